# src/services/integrability.py
"""
Gliders, soliton swaps, conserved charges, glider completeness, parafermion
strings and the set-theoretic Yang-Baxter check.
"""
import itertools
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import null_space
from tqdm import tqdm

from src.services.chm import as_matrix, check_hadamard, sinkhorn_symmetric
from src.services.statevector import (CircuitSpec, brickwork_gate, floquet,
                                      is_unitary, place_operator, plus_state)
from src.services.weyl import (SymplecticString, commutation_exponent,
                               proportionality_factor, string_matrix)
from src.utils.errors import (ConvergenceError, NumericalError,
                              PreconditionError, ShapeError)
from src.utils.lattice_config import DEFAULTS
from src.utils.logger import setup_logger

logger = setup_logger("integrability")

DIRECTIONS = ("plus", "minus")
DIRECTION_SYMBOL = {"plus": "+", "minus": "-"}

# Printed to three decimals; polish with sinkhorn_symmetric(initial=...) before use
REFERENCE_Q6_TEXT = """
0.894+0.449i -0.311-0.951i 0.616-0.788i 0.746+0.665i 0.675+0.738i 0.138+0.99i
-0.311-0.951i 0.455-0.891i -0.068+0.998i -0.991-0.132i 0.963+0.269i 0.699+0.716i
0.616-0.788i -0.068+0.998i 0.533+0.846i 0.458+0.889i -0.909+0.417i 0.949+0.314i
0.746+0.665i -0.991-0.132i 0.458+0.889i -0.348-0.937i 0.18+0.984i 0.197-0.98i
0.675+0.738i 0.963+0.269i -0.909+0.417i 0.18+0.984i 0.991-0.131i 0.4-0.916i
0.138+0.99i 0.699+0.716i 0.949+0.314i 0.197-0.98i 0.4-0.916i 0.55+0.835i
"""


@dataclass
class GliderOperator:
    q: int
    site: int
    direction: str
    matrix: np.ndarray


@dataclass(frozen=True)
class ChargeSpec:
    """Q_{k,dir} with inner pattern n_1..n_{k-1}, each '0' or the direction symbol."""
    k: int
    pattern: Tuple[str, ...] = ()
    direction: str = "plus"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"❌ Unknown direction '{self.direction}'\n✅ Supported: plus, minus")
        if self.k < 1 or len(self.pattern) != self.k - 1:
            raise ValueError(f"❌ Pattern length must be k-1={self.k - 1}, got {len(self.pattern)}")
        allowed = {"0", DIRECTION_SYMBOL[self.direction]}
        if not set(self.pattern) <= allowed:
            raise ValueError(f"❌ Pattern {self.pattern} must use symbols {sorted(allowed)}")

    @property
    def support(self) -> int:
        return self.k + 2

    def label(self) -> str:
        return f"Q_{self.k},{DIRECTION_SYMBOL[self.direction]}({''.join(self.pattern)})"


def _require_hadamard(M, label: str, symmetric: bool = False) -> np.ndarray:
    M = as_matrix(M)
    report = check_hadamard(M, DEFAULTS["hadamard_tol"])
    if not report.is_hadamard:
        raise PreconditionError(f"❌ {label} is not a complex Hadamard matrix")
    if symmetric and not report.is_symmetric:
        raise PreconditionError(
            f"❌ {label} must be symmetric (deviation {report.symmetry_deviation:.2e})"
        )
    return M


def _require_dual_pair(u_H: np.ndarray, u_V: Optional[np.ndarray]) -> np.ndarray:
    """u_V must equal u_H^dagger up to a global phase; None selects u_H^dagger."""
    if u_V is None:
        return u_H.conj().T
    u_V = as_matrix(u_V)
    if proportionality_factor(u_V, u_H.conj().T, 1e-8) is None:
        raise PreconditionError("❌ u_V must equal u_H^dagger up to a global phase")
    return u_V


# Gliders ----------------------------------------------------------------------

def glider(u_H, direction: str = "plus", j: int = 0, require_symmetric: bool = True) -> GliderOperator:
    """
    Two-site projector-like operator moving rigidly through the circuit.

    plus:  sum_abc conj(u_H(a,b)) u_H(a,c) |a><a|_j (x) |b><c|_{j+1}
    minus: sum_abc conj(u_H(b,a)) u_H(c,a) |b><c|_j (x) |a><a|_{j+1}
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"❌ Unknown direction '{direction}'\n✅ Supported: plus, minus")
    u = _require_hadamard(u_H, "u_H", symmetric=require_symmetric)
    q = u.shape[0]
    eye = np.eye(q)
    if direction == "plus":
        tensor = np.einsum("ab,ac,ad->abdc", u.conj(), u, eye)
    else:
        tensor = np.einsum("ba,ca,ad->bacd", u.conj(), u, eye)
    return GliderOperator(q=q, site=j, direction=direction, matrix=tensor.reshape(q * q, q * q))


def glider_unitary_form(u_H) -> np.ndarray:
    """D^dagger (1 (x) q|+><+|) D with D = diag(u_H(a, b))."""
    u = as_matrix(u_H)
    q = u.shape[0]
    D = np.diag(u.ravel())
    projector = np.kron(np.eye(q), np.ones((q, q), dtype=complex))
    return D.conj().T @ projector @ D


def soliton_swap_check(u_H, u_V=None, sides: str = "both", tol: float = 1e-8) -> bool:
    """
    U(|+> (x) psi) = psi (x) |+> (left) and U(psi (x) |+>) = |+> (x) psi (right)
    for a basis of psi, one global phase per gate. The right side needs a
    symmetric u_H.
    """
    u = _require_hadamard(u_H, "u_H")
    v = _require_dual_pair(u, u_V)
    q = u.shape[0]
    gate = brickwork_gate(u, v)
    plus = plus_state(q)
    basis = np.eye(q, dtype=complex)

    checks = []
    if sides in ("both", "left"):
        outputs = np.column_stack([gate @ np.kron(plus, e) for e in basis])
        targets = np.column_stack([np.kron(e, plus) for e in basis])
        checks.append(proportionality_factor(outputs, targets, tol) is not None)
    if sides in ("both", "right"):
        outputs = np.column_stack([gate @ np.kron(e, plus) for e in basis])
        targets = np.column_stack([np.kron(plus, e) for e in basis])
        checks.append(proportionality_factor(outputs, targets, tol) is not None)
    if not checks:
        raise ValueError(f"❌ sides must be both, left or right, got '{sides}'")
    return all(checks)


def glider_translation_check(spec: CircuitSpec, g: GliderOperator, tol: float = 1e-8) -> bool:
    """Floquet (g at j) Floquet^dagger == g at j+1 (plus) or j-1 (minus), periodic."""
    _require_dual_pair(spec.u_H, spec.u_V)
    if spec.N < 3:
        raise ShapeError(f"❌ Translation check needs N >= 3, got {spec.N}")
    U = floquet(spec)
    N, q = spec.N, spec.q
    j = g.site % N
    shift = 1 if g.direction == "plus" else -1
    placed = place_operator(g.matrix, [j, (j + 1) % N], q, N)
    target = place_operator(g.matrix, [(j + shift) % N, (j + shift + 1) % N], q, N)
    evolved = U @ placed @ U.conj().T
    return proportionality_factor(evolved, target, tol) is not None


def _two_site_transfer(u: np.ndarray, v: np.ndarray, direction: str) -> np.ndarray:
    """
    Linear map on two-site operators: one Floquet step followed by the
    normalized partial trace over the two sites the glider leaves behind.
    Fixed points are exactly the gliders of that direction.
    """
    q = u.shape[0]
    w, wc, uc = v / np.sqrt(q), (v / np.sqrt(q)).conj(), u.conj()
    R = np.zeros((q,) * 8, dtype=complex)
    if direction == "plus":
        core = np.einsum("xa,yz,Xb,Yz,ca,cb,az,bz->xyXYcab",
                         w, w, wc, wc, u, uc, u, uc, optimize=True) / q
        for c in range(q):
            R[:, :, :, :, c, :, c, :] = core[:, :, :, :, c, :, :]
    else:
        core = np.einsum("xd,ya,Xd,Yb,da,db,ae,be->xyXYabe",
                         w, w, wc, wc, u, uc, u, uc, optimize=True) / q
        for e in range(q):
            R[:, :, :, :, :, e, :, e] = core[:, :, :, :, :, :, e]
    return R.reshape(q ** 4, q ** 4)


def glider_completeness(u_H, u_V=None, rcond: float = 1e-9) -> Dict[str, object]:
    """
    Dimension of the space of two-site gliders in each direction, identity included.
    spans is True when both directions carry at least q independent gliders.
    """
    start_time = time.time()
    u = _require_hadamard(u_H, "u_H")
    v = _require_dual_pair(u, u_V)
    q = u.shape[0]
    counts = {}
    for direction in DIRECTIONS:
        R = _two_site_transfer(u, v, direction)
        counts[direction] = null_space(R - np.eye(q ** 4), rcond=rcond).shape[1]
    report = {
        'q': q,
        'right_count': counts["plus"],
        'left_count': counts["minus"],
        'right_nontrivial': counts["plus"] - 1,
        'left_nontrivial': counts["minus"] - 1,
        'spans': counts["plus"] >= q and counts["minus"] >= q,
        'processing_time': round(time.time() - start_time, 2),
        'status': 'success',
    }
    logger.info(f"Glider completeness q={q}: right={counts['plus']} left={counts['minus']}")
    return report


# Conserved charges ------------------------------------------------------------

def enumerate_charges(kmax: int, direction: str = "plus") -> List[ChargeSpec]:
    symbol = DIRECTION_SYMBOL[direction]
    charges = []
    for k in range(1, kmax + 1):
        for pattern in itertools.product(("0", symbol), repeat=k - 1):
            charges.append(ChargeSpec(k=k, pattern=tuple(pattern), direction=direction))
    return charges


def conserved_charge(spec: CircuitSpec, charge: ChargeSpec) -> np.ndarray:
    """
    sum_j g_j g^{(n_1)}_{j+1} ... g^{(n_{k-1})}_{j+k-1} g_{j+k} over the ring,
    with g^{(0)} = 1. Dense q^N operator.
    """
    if charge.support > spec.N:
        raise ShapeError(f"❌ {charge.label()} spans {charge.support} sites, more than N={spec.N}")
    _require_dual_pair(spec.u_H, spec.u_V)
    q, N = spec.q, spec.N
    g = glider(spec.u_H, charge.direction).matrix
    symbols = [DIRECTION_SYMBOL[charge.direction]] + list(charge.pattern) + [DIRECTION_SYMBOL[charge.direction]]

    total = np.zeros((q ** N, q ** N), dtype=complex)
    for j in range(N):
        term = np.eye(q ** N, dtype=complex)
        for offset, symbol in enumerate(symbols):
            if symbol == "0":
                continue
            site = (j + offset) % N
            term = term @ place_operator(g, [site, (site + 1) % N], q, N)
        total += term
    return total


def charge_commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.max(np.abs(A @ B - B @ A)))


def charge_report(spec: CircuitSpec, kmax: int = 2) -> List[Dict[str, object]]:
    """Commutator of every charge up to kmax (both directions) with the Floquet unitary."""
    U = floquet(spec)
    rows = []
    for direction in DIRECTIONS:
        for charge in enumerate_charges(kmax, direction):
            if charge.support > spec.N:
                continue
            Q = conserved_charge(spec, charge)
            rows.append({'charge': charge.label(),
                         'commutator': charge_commutator_norm(Q, U),
                         'norm': float(np.max(np.abs(Q)))})
    return rows


# Parafermions -------------------------------------------------------------------

def parafermion(q: int, N: int, j: int, flavor: str = "X") -> SymplecticString:
    """
    Psi_X(j) = (prod_{k<j} Z_k X_k^-1) X_j^-1 and Psi_Z(j) = (prod_{k<j} Z_k X_k^-1) Z_j,
    sites 0..N-1.
    """
    if not 0 <= j < N:
        raise ShapeError(f"❌ Site {j} outside 0..{N - 1}")
    A = np.zeros(N, dtype=np.int64)
    B = np.zeros(N, dtype=np.int64)
    A[:j] = 1
    B[:j] = -1
    if flavor.upper() == "X":
        B[j] = -1
    elif flavor.upper() == "Z":
        A[j] = 1
    else:
        raise ValueError(f"❌ Unknown flavor '{flavor}'\n✅ Supported: X, Z")
    return SymplecticString(q, A, B)


def parafermion_matrix(q: int, N: int, j: int, flavor: str = "X") -> np.ndarray:
    """Dense matrix with exact phases; each site carries Z^a X^b in canonical order."""
    return string_matrix(parafermion(q, N, j, flavor))


def exchange_phase(q: int, N: int, j: int, k: int, flavor_j: str, flavor_k: str) -> int:
    """m with Psi(j) Psi(k) = w^m Psi(k) Psi(j)."""
    return commutation_exponent(parafermion(q, N, j, flavor_j), parafermion(q, N, k, flavor_k))


# Yang-Baxter ----------------------------------------------------------------------

def ybe_check(gate, q: Optional[int] = None, tol: Optional[float] = None) -> Tuple[bool, float]:
    """Max-entry residual of U_12 U_23 U_12 - U_23 U_12 U_23 on three sites."""
    tol = DEFAULTS["ybe_tol"] if tol is None else tol
    gate = as_matrix(gate)
    q = int(round(np.sqrt(gate.shape[0]))) if q is None else q
    if gate.shape != (q * q, q * q):
        raise ShapeError(f"❌ Gate must be {q * q}x{q * q}, got {gate.shape}")
    if not is_unitary(gate, 1e-8):
        raise PreconditionError("❌ Yang-Baxter check needs a unitary gate")
    eye = np.eye(q, dtype=complex)
    U12 = np.kron(gate, eye)
    U23 = np.kron(eye, gate)
    residual = float(np.max(np.abs(U12 @ U23 @ U12 - U23 @ U12 @ U23)))
    return residual < tol, residual


def ybe_gate(u_H) -> np.ndarray:
    """Brickwork gate built from u_H and u_V = u_H^dagger."""
    u = as_matrix(u_H)
    return brickwork_gate(u, u.conj().T)


def reference_q6_matrix(polish: bool = True) -> np.ndarray:
    """The printed non-braiding q=6 symmetric CHM, optionally polished to full precision."""
    rows = [line.split() for line in REFERENCE_Q6_TEXT.strip().splitlines()]
    M = np.array([[complex(tok.replace("i", "j")) for tok in row] for row in rows])
    if polish:
        M = sinkhorn_symmetric(6, initial=M)
    return M


def _ybe_for_seed(q: int, seed: int, tol: float, max_iter: int) -> Dict[str, object]:
    try:
        u = sinkhorn_symmetric(q, seed=seed, max_iter=max_iter)
    except (ConvergenceError, NumericalError) as e:
        return {'q': q, 'seed': seed, 'residual': float("nan"), 'pass': None,
                'status': f"sinkhorn failed: {type(e).__name__}"}
    passed, residual = ybe_check(ybe_gate(u), q, tol)
    return {'q': q, 'seed': seed, 'residual': residual, 'pass': passed, 'status': 'success'}


def ybe_scan(q: int, seeds: Sequence[int], tol: Optional[float] = None,
             max_iter: Optional[int] = None, jobs: int = 1,
             progress: bool = False) -> List[Dict[str, object]]:
    """
    Sinkhorn CHM per seed, brickwork gate, Yang-Baxter residual. A seed whose
    Sinkhorn run fails gets residual nan, pass None and a status naming the
    error; the scan continues.
    """
    tol = DEFAULTS["ybe_tol"] if tol is None else tol
    max_iter = DEFAULTS["sinkhorn_max_iter"] if max_iter is None else max_iter
    start_time = time.time()
    seeds = list(seeds)
    results = Parallel(n_jobs=jobs, return_as="generator")(
        delayed(_ybe_for_seed)(q, s, tol, max_iter) for s in seeds)
    rows = list(tqdm(results, total=len(seeds), desc=f"YBE scan q={q}", disable=not progress))
    failures = [r for r in rows if r['status'] != 'success']
    if failures:
        logger.warning(f"Sinkhorn did not converge for {len(failures)} of {len(seeds)} seeds at q={q}")
    converged = len(seeds) - len(failures)
    logger.info(f"YBE scan q={q}: {sum(bool(r['pass']) for r in rows)}/{converged} converged seeds pass "
                f"({time.time() - start_time:.2f}s)")
    return rows
