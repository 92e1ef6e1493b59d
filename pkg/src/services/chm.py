# src/services/chm.py
"""
Complex Hadamard matrices: named constructions, checks, equivalence search
and the symmetric Sinkhorn generator.

A complex Hadamard matrix (CHM) of order q has unimodular entries and
satisfies H^dagger H = q * 1. Rows and columns are indexed by the canonical
residues 0..q-1.
"""
import itertools
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import polar

from src.utils.errors import (ConvergenceError, InvalidDimensionError,
                              NumericalError, PreconditionError, ShapeError,
                              UnsupportedDimensionError)
from src.utils.lattice_config import DEFAULTS
from src.utils.logger import setup_logger

logger = setup_logger("chm")

MAX_SEARCH_DIM = 6
SINKHORN_SEED_STRIDE = 2 ** 20


@dataclass(frozen=True)
class HadamardReport:
    dim: int
    is_unimodular: bool
    max_modulus_deviation: float
    max_unitarity_deviation: float
    is_symmetric: bool
    symmetry_deviation: float
    tol: float

    @property
    def is_hadamard(self) -> bool:
        return self.is_unimodular and self.max_unitarity_deviation <= self.tol


def as_matrix(M) -> np.ndarray:
    """Validate a square, finite complex matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"❌ Expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalError("❌ Matrix contains NaN or Inf entries")
    return M


def _check_q(q: int) -> int:
    if int(q) != q or q < 2:
        raise InvalidDimensionError(f"❌ Local dimension must be an integer >= 2, got {q}")
    return int(q)


def fourier(q: int) -> np.ndarray:
    """Unnormalized discrete Fourier matrix, entry (j, k) = exp(2 pi i jk / q)."""
    q = _check_q(q)
    j = np.arange(q)
    return np.exp(2j * np.pi * (np.outer(j, j) % q) / q)


def named_hadamard(name: str) -> np.ndarray:
    """K2, K3 or F2xF2 as literal matrices."""
    key = name.strip().upper()
    w3 = np.exp(2j * np.pi / 3)
    if key == "K2":
        return np.array([[1, 1j], [1j, 1]], dtype=complex)
    if key == "K3":
        return np.array([[1, w3, w3], [w3, 1, w3], [w3, w3, 1]], dtype=complex)
    if key in ("F2XF2", "F2⊗F2"):
        return np.array([[1, 1, 1, 1],
                         [1, -1, 1, -1],
                         [1, 1, -1, -1],
                         [1, -1, -1, 1]], dtype=complex)
    raise ValueError(f"❌ Unknown named Hadamard: {name}\n✅ Supported: K2, K3, F2xF2")


def f4_family(a: float) -> np.ndarray:
    """One-parameter orbit of order-4 Hadamards; a=0 gives F4, a=pi/2 a +-1 matrix."""
    e = 1j * np.exp(1j * a)
    return np.array([[1, 1, 1, 1],
                     [1, e, -1, -e],
                     [1, -1, 1, -1],
                     [1, -e, -1, e]], dtype=complex)


def tensor(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def unitarity_deviation(M: np.ndarray) -> float:
    q = M.shape[0]
    return float(np.max(np.abs(M.conj().T @ M - q * np.eye(q))))


def check_hadamard(M, tol: Optional[float] = None) -> HadamardReport:
    """Measure how far M is from being a (symmetric) complex Hadamard matrix."""
    tol = DEFAULTS["hadamard_tol"] if tol is None else tol
    M = as_matrix(M)
    modulus_dev = float(np.max(np.abs(np.abs(M) - 1.0)))
    symmetry_dev = float(np.max(np.abs(M - M.T)))
    return HadamardReport(
        dim=M.shape[0],
        is_unimodular=modulus_dev <= tol,
        max_modulus_deviation=modulus_dev,
        max_unitarity_deviation=unitarity_deviation(M),
        is_symmetric=symmetry_dev <= tol,
        symmetry_deviation=symmetry_dev,
        tol=tol,
    )


def require_hadamard(M, tol: Optional[float] = None, what: str = "matrix") -> np.ndarray:
    M = as_matrix(M)
    report = check_hadamard(M, tol)
    if not report.is_hadamard:
        raise PreconditionError(
            f"❌ {what} is not a complex Hadamard matrix "
            f"(modulus dev {report.max_modulus_deviation:.2e}, "
            f"unitarity dev {report.max_unitarity_deviation:.2e})"
        )
    return M


def _dephase(M: np.ndarray) -> np.ndarray:
    out = M / M[:, [0]]
    return out / out[[0], :]


def dephase(M, tol: Optional[float] = None) -> np.ndarray:
    """Return D1 M D2 whose first row and column are all ones."""
    M = require_hadamard(M, tol, "dephase input")
    return _dephase(M)


def _columns_match(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    """True iff B's columns are a permutation of A's columns (entrywise within tol)."""
    dist = np.abs(A[:, :, None] - B[:, None, :]).max(axis=0)
    close = dist <= tol
    return bool(np.all(close.sum(axis=1) == 1) and np.all(close.sum(axis=0) == 1))


def _check_search(M1: np.ndarray, M2: np.ndarray) -> int:
    if M1.shape != M2.shape:
        raise ShapeError(f"❌ Dimension mismatch: {M1.shape} vs {M2.shape}")
    n = M1.shape[0]
    if n > MAX_SEARCH_DIM:
        raise UnsupportedDimensionError(
            f"❌ Permutation search limited to dim <= {MAX_SEARCH_DIM}, got {n}"
        )
    return n


def permutation_equivalent(M1, M2, tol: float = 1e-8) -> bool:
    """Search row permutations; columns are matched directly."""
    M1, M2 = as_matrix(M1), as_matrix(M2)
    n = _check_search(M1, M2)
    for perm in itertools.permutations(range(n)):
        if _columns_match(M1, M2[list(perm)], tol):
            return True
    return False


def hadamard_equivalent(M1, M2, tol: float = 1e-8) -> bool:
    """
    Test M1 = D1 P1 M2 P2 D2 by dephasing after each row permutation and each
    choice of leading column. Sufficient, not proven complete, beyond dim 5.
    """
    M1 = require_hadamard(M1, what="first matrix")
    M2 = require_hadamard(M2, what="second matrix")
    n = _check_search(M1, M2)
    target = _dephase(M1)
    for perm in itertools.permutations(range(n)):
        rows = M2[list(perm)]
        for lead in range(n):
            cols = [lead] + [c for c in range(n) if c != lead]
            if _columns_match(target, _dephase(rows[:, cols]), tol):
                return True
    return False


def shear_matrix(q: int, alpha: int) -> np.ndarray:
    """S^alpha = diag(exp(i pi alpha j^2 / q))."""
    q = _check_q(q)
    j = np.arange(q)
    return np.diag(np.exp(1j * np.pi * alpha * j ** 2 / q))


def cat_hadamard(q: int, alpha: int, delta: int) -> np.ndarray:
    """
    C(alpha, delta) = S^alpha F S^delta.

    The exponent 2 pi [alpha j^2/2 + jk + delta k^2/2] / q is evaluated as a
    real number on canonical representatives, never reduced mod q first.
    """
    q = _check_q(q)
    j = np.arange(q)[:, None]
    k = np.arange(q)[None, :]
    phase = (2 * np.pi / q) * (alpha * j ** 2 / 2 + j * k + delta * k ** 2 / 2)
    return np.exp(1j * phase)


def ising_phase_function(name: str) -> np.ndarray:
    """K2 and F2 written as Ising couplings in sigma = (-1)^z."""
    sigma = np.array([1, -1])
    si, sj = sigma[:, None], sigma[None, :]
    key = name.strip().upper()
    if key == "K2":
        return np.exp(1j * np.pi / 4) * np.exp(-1j * np.pi / 4 * si * sj)
    if key == "F2":
        return np.exp(1j * np.pi / 4) * np.exp(1j * np.pi / 4 * (si * sj - si - sj))
    raise ValueError(f"❌ No Ising form for {name}\n✅ Supported: K2, F2")


def kicked_potts_pair(alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Horizontal and vertical bond matrices of the q=3 kicked Potts chain with
    equal kick and coupling times alpha. The vertical matrix is rescaled by
    sqrt(3) so that both are Hadamard-normalized at the integrable points.
    """
    same = np.eye(3)
    u_h = same * np.exp(-2j * alpha) + (1 - same) * np.exp(1j * alpha)
    u_v = (np.exp(-2j * alpha) - np.exp(1j * alpha)) / 3 + same * np.exp(1j * alpha)
    return u_h, np.sqrt(3) * u_v


def kicked_potts_integrable(m: int = 1, l: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Integrable points alpha = 2 pi (3l - m) / 9, m in {1, 2}."""
    if m not in (1, 2):
        raise ValueError(f"❌ m must be 1 or 2 (m=0 is the trivial point), got {m}")
    return kicked_potts_pair(2 * np.pi * (3 * l - m) / 9)


def random_start(q: int, seed: int) -> np.ndarray:
    """Seeded complex matrix, real and imaginary parts uniform on [-1, 1] (PCG64)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (q, q)) + 1j * rng.uniform(-1.0, 1.0, (q, q))


def _restart_matrix(q: int, seed: int, restart: int, initial: Optional[np.ndarray]) -> np.ndarray:
    """Fresh start after a stall: a derived seed, or a seeded phase kick of the supplied start."""
    derived = seed + restart * SINKHORN_SEED_STRIDE
    if initial is None:
        return random_start(q, derived)
    rng = np.random.default_rng(derived)
    return initial * np.exp(1j * DEFAULTS["sinkhorn_kick"] * rng.uniform(-np.pi, np.pi, (q, q)))


def sinkhorn_symmetric(q: int, seed: int = 0, tol: Optional[float] = None,
                       max_iter: Optional[int] = None, initial=None,
                       symmetric: bool = True) -> np.ndarray:
    """
    Generate a symmetric complex Hadamard matrix by alternating projections.

    Each iteration takes the polar factor, symmetrizes it and normalizes every
    entry to unit modulus. Every `sinkhorn_window` iterations the deviation is
    compared with the previous checkpoint; a run that did not shrink it below
    `sinkhorn_stall_ratio` times that value is stuck (a non-Hadamard fixed point
    or a plateau) and restarts from seed + k * 2**20, or from a phase kick of
    `initial` when one is given.

    Args:
        q: Matrix order
        seed: Seed for the random starting matrix
        tol: Stop when max |M^dagger M - q 1| falls below this
        max_iter: Cap on the total number of iterations over all restarts
        initial: Optional starting matrix, e.g. a rounded CHM to polish
        symmetric: Symmetrize the polar factor each step

    Returns:
        Converged CHM, exactly symmetric when symmetric=True
    """
    q = _check_q(q)
    tol = DEFAULTS["sinkhorn_tol"] if tol is None else tol
    max_iter = DEFAULTS["sinkhorn_max_iter"] if max_iter is None else max_iter
    window = DEFAULTS["sinkhorn_window"]

    if initial is None:
        M = random_start(q, seed)
    else:
        initial = as_matrix(initial)
        if initial.shape != (q, q):
            raise ShapeError(f"❌ Initial matrix has shape {initial.shape}, expected {(q, q)}")
        M = initial

    singular_values = np.linalg.svd(M, compute_uv=False)
    if singular_values[-1] <= 1e-12 * singular_values[0]:
        raise NumericalError("❌ Starting matrix is singular; polar factor undefined")

    start_time = time.time()
    deviation = np.inf
    checkpoint = np.inf
    restarts = 0
    since_restart = 0
    for iteration in range(1, max_iter + 1):
        U, _ = polar(M)
        if symmetric:
            U = (U + U.T) / 2
        modulus = np.abs(U)
        since_restart += 1
        if modulus.min() < 1e-14:
            stalled = True
        else:
            M = U / modulus
            deviation = unitarity_deviation(M)
            if deviation < tol:
                logger.debug(f"Sinkhorn q={q} seed={seed} converged in {iteration} iterations, "
                             f"{restarts} restarts ({time.time() - start_time:.3f}s)")
                return M
            stalled = False
            if since_restart % window == 0:
                stalled = deviation > DEFAULTS["sinkhorn_stall_ratio"] * checkpoint
                checkpoint = deviation

        if stalled:
            restarts += 1
            logger.info(f"Sinkhorn q={q} seed={seed} stalled at deviation {deviation:.2e} "
                        f"after {iteration} iterations; restart {restarts}")
            M = _restart_matrix(q, seed, restarts, initial)
            checkpoint = np.inf
            since_restart = 0

    raise ConvergenceError(
        f"❌ Sinkhorn q={q} seed={seed} did not converge after {max_iter} iterations "
        f"and {restarts} restarts (last deviation {deviation:.2e})",
        last_deviation=float(deviation),
        iterations=max_iter,
    )


BUILTIN_NAMES = ("f<q>", "k2", "k3", "f2xf2", "f4a:<angle>", "k3potts", "k3potts2",
                 "cat:<q>:<alpha>:<delta>")


def builtin_pair(name: str) -> Tuple[np.ndarray, np.ndarray]:
    """Resolve a builtin name to (u_H, u_V); u_V defaults to u_H^dagger."""
    key = name.strip().lower()
    if key.startswith("builtin:"):
        key = key[len("builtin:"):]

    if key == "k3potts":
        return kicked_potts_integrable(1)
    if key == "k3potts2":
        return kicked_potts_integrable(2)

    if key in ("k2", "k3", "f2xf2"):
        u_h = named_hadamard(key)
    elif key.startswith("f4a:"):
        u_h = f4_family(float(key.split(":", 1)[1]))
    elif key.startswith("cat:"):
        parts = key.split(":")
        if len(parts) != 4:
            raise ValueError(f"❌ Expected cat:<q>:<alpha>:<delta>, got {name}")
        u_h = cat_hadamard(int(parts[1]), int(parts[2]), int(parts[3]))
    elif key.startswith("f") and key[1:].isdigit():
        u_h = fourier(int(key[1:]))
    else:
        raise ValueError(f"❌ Unknown builtin Hadamard: {name}\n✅ Supported: {', '.join(BUILTIN_NAMES)}")
    return u_h, u_h.conj().T
