# src/services/symplectic_ca.py
"""
Exact mod-q operator dynamics of the coupled Clifford cat lattice.

One Floquet step is a horizontal (row) update with u_H followed by a vertical
update with the cat matrix of parameters (alpha, delta). Exponent rows are
numpy int64 vectors of canonical residues on a periodic ring of N sites.
"""
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_form

from src.services.weyl import SymplecticString
from src.utils.errors import (ClassificationError, InvalidDimensionError,
                              ShapeError)
from src.utils.logger import setup_logger

logger = setup_logger("symplectic_ca")

VARIANTS = ("F", "Fdagger")
RULE150R_VARIANTS = ("minus", "plus-minus")


class AutomatonClass(str, Enum):
    GLIDER = "Glider"
    FRACTAL = "Fractal"


@dataclass(frozen=True)
class CaConfig:
    q: int
    N: int
    alpha: int = 0
    delta: int = 0
    horizontal: str = "Fdagger"

    def __post_init__(self):
        if self.q < 2:
            raise InvalidDimensionError(f"❌ q must be >= 2, got {self.q}")
        if self.N < 2:
            raise InvalidDimensionError(f"❌ N must be >= 2, got {self.N}")
        if self.horizontal not in VARIANTS:
            raise ValueError(f"❌ Unknown horizontal variant '{self.horizontal}'\n"
                             f"✅ Supported: {', '.join(VARIANTS)}")

    @property
    def kick_sign(self) -> int:
        """Sign with which b_{x-1} + b_{x+1} enters the horizontal kick."""
        return 1 if self.horizontal == "Fdagger" else -1

    @property
    def automaton_class(self) -> AutomatonClass:
        return classify(self.alpha, self.delta, self.q)

    def with_variant(self, horizontal: str) -> "CaConfig":
        return CaConfig(self.q, self.N, self.alpha, self.delta, horizontal)


@dataclass
class CaGrid:
    """Rows t = 0..T of the exponent vectors, shape (T+1, N) each."""
    config: CaConfig
    A: np.ndarray
    B: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def T_steps(self) -> int:
        return self.B.shape[0] - 1

    def row(self, t: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.A[t], self.B[t]

    def string_at(self, t: int) -> SymplecticString:
        return SymplecticString(self.config.q, self.A[t], self.B[t])

    def __eq__(self, other) -> bool:
        if not isinstance(other, CaGrid):
            return NotImplemented
        return (self.config.q == other.config.q
                and np.array_equal(self.A, other.A) and np.array_equal(self.B, other.B))


def _validate_rows(config: CaConfig, A, B) -> Tuple[np.ndarray, np.ndarray]:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape != (config.N,) or B.shape != (config.N,):
        raise ShapeError(f"❌ Rows must have length N={config.N}, got {A.shape} and {B.shape}")
    return np.mod(A, config.q), np.mod(B, config.q)


def neighbor_sum(B: np.ndarray) -> np.ndarray:
    """b_{x-1} + b_{x+1} on the ring."""
    return np.roll(B, 1) + np.roll(B, -1)


def step(config: CaConfig, A, B) -> Tuple[np.ndarray, np.ndarray]:
    """
    One Floquet step of the exponent vectors.

    F variant:       a~ = a - b_{x-1} - b_{x+1}
    Fdagger variant: a~ = a + b_{x-1} + b_{x+1}
    then a' = alpha a~ + (alpha delta - 1) b and b' = a~ + delta b, mod q.
    """
    A, B = _validate_rows(config, A, B)
    alpha, delta, q = config.alpha, config.delta, config.q
    kicked = A + config.kick_sign * neighbor_sum(B)
    A_next = np.mod(alpha * kicked + (alpha * delta - 1) * B, q)
    B_next = np.mod(kicked + delta * B, q)
    return A_next, B_next


def evolve(config: CaConfig, A0, B0, T: int) -> CaGrid:
    """Run T steps and keep every intermediate row."""
    if T < 0:
        raise ValueError(f"❌ Number of steps must be >= 0, got {T}")
    start_time = time.time()
    A, B = _validate_rows(config, A0, B0)
    rows_a = np.empty((T + 1, config.N), dtype=np.int64)
    rows_b = np.empty((T + 1, config.N), dtype=np.int64)
    rows_a[0], rows_b[0] = A, B
    for t in range(T):
        A, B = step(config, A, B)
        rows_a[t + 1], rows_b[t + 1] = A, B
    logger.debug(f"Evolved q={config.q} N={config.N} for {T} steps in "
                 f"{time.time() - start_time:.4f}s")
    return CaGrid(config=config, A=rows_a, B=rows_b)


def classify(alpha: int, delta: int, q: int) -> AutomatonClass:
    return AutomatonClass.GLIDER if (alpha + delta) % q == 0 else AutomatonClass.FRACTAL


# Symbolic analysis -----------------------------------------------------------

U_SYMBOL = sympy.Symbol("u")


def characteristic_matrix(alpha: int, delta: int, variant: str = "Fdagger") -> sympy.Matrix:
    """Fourier-space single-step matrix M(u, 1/u) acting on (a_k, b_k)."""
    u = U_SYMBOL
    sign = 1 if variant == "Fdagger" else -1
    w = sign * (u + 1 / u)
    return sympy.Matrix([[alpha, alpha * delta - 1 + alpha * w],
                         [1, delta + w]])


def laurent_coefficients(expr, shift: int = 4) -> Dict[int, int]:
    """Map power of u to its integer coefficient, zero coefficients omitted."""
    poly = sympy.Poly(sympy.expand(expr * U_SYMBOL ** shift), U_SYMBOL)
    return {power - shift: int(c) for (power,), c in poly.terms() if c != 0}


def characteristic_trace(alpha: int, delta: int, variant: str = "Fdagger") -> Dict[int, int]:
    """Trace of the single-step matrix as {power of u: coefficient}."""
    return laurent_coefficients(characteristic_matrix(alpha, delta, variant).trace())


def lagrangian_residual(grid: CaGrid) -> np.ndarray:
    """
    Residual of the second-order equation of motion, rows t = 1..T-1:
    b_{t+1} + b_{t-1} - s (b_{x-1} + b_{x+1})_t - (alpha + delta) b_t, mod q,
    with s = +1 for Fdagger and -1 for F. Zero for every valid trajectory.
    """
    cfg = grid.config
    B = grid.B
    if grid.T_steps < 2:
        return np.zeros((0, cfg.N), dtype=np.int64)
    neighbors = np.roll(B[1:-1], 1, axis=1) + np.roll(B[1:-1], -1, axis=1)
    residual = (B[2:] + B[:-2] - cfg.kick_sign * neighbors
                - (cfg.alpha + cfg.delta) * B[1:-1])
    return np.mod(residual, cfg.q)


def momentum_residual(grid: CaGrid) -> np.ndarray:
    """a_t - alpha b_t + b_{t-1} mod q for t = 1..T."""
    cfg = grid.config
    return np.mod(grid.A[1:] - cfg.alpha * grid.B[1:] + grid.B[:-1], cfg.q)


# Gliders ---------------------------------------------------------------------

def glider_solutions(config: CaConfig, site: int = 0) -> Dict[str, List[SymplecticString]]:
    """
    The 2q two-site generators on bond (site, site+1), n = 0..q-1.

    Fdagger form: right_n = n (a_j = 1, a_{j+1} = delta, b_{j+1} = -1),
    left_n = n (a_j = delta, b_j = -1, a_{j+1} = 1). For alpha = delta = 0
    these are Z_j^n X_{j+1}^{-n} and X_j^{-n} Z_{j+1}^n. In the F variant the
    entries on site j+1 are negated and the strings invert at every step.
    """
    if config.automaton_class is not AutomatonClass.GLIDER:
        raise ClassificationError(
            f"❌ Glider generators need alpha + delta = 0 mod q, got alpha={config.alpha}, "
            f"delta={config.delta}, q={config.q}"
        )
    q, N, delta = config.q, config.N, config.delta
    j, k = site % N, (site + 1) % N
    flip = 1 if config.horizontal == "Fdagger" else -1

    right, left = [], []
    for n in range(q):
        A = np.zeros(N, dtype=np.int64)
        B = np.zeros(N, dtype=np.int64)
        A[j] += n
        A[k] += flip * n * delta
        B[k] += -flip * n
        right.append(SymplecticString(q, A, B))

        A = np.zeros(N, dtype=np.int64)
        B = np.zeros(N, dtype=np.int64)
        A[j] += n * delta
        B[j] += -n
        A[k] += flip * n
        left.append(SymplecticString(q, A, B))
    return {"right": right, "left": left}


def glider_generator_matrix(config: CaConfig) -> np.ndarray:
    """Rows are the n=1 right and left generators on every bond, as (A, B) vectors."""
    rows = []
    for j in range(config.N):
        gens = glider_solutions(config, j)
        for s in (gens["right"][1], gens["left"][1]):
            rows.append(np.concatenate([s.A, s.B]))
    return np.array(rows, dtype=np.int64)


def glider_span_rank(config: CaConfig) -> int:
    """
    Rank over Z_q of the module spanned by all glider generators on the ring,
    read off the Smith normal form as the number of invariant factors coprime to q.
    """
    matrix = sympy.Matrix(glider_generator_matrix(config).tolist())
    snf = smith_normal_form(matrix, domain=sympy.ZZ)
    diagonal = [snf[i, i] for i in range(min(snf.shape))]
    rank = sum(1 for d in diagonal if d != 0 and math.gcd(abs(int(d)), config.q) == 1)
    logger.info(f"Glider span rank q={config.q} N={config.N}: {rank} of {2 * config.N}")
    return rank


def recurrence_time(config: CaConfig, A0, B0, max_steps: Optional[int] = None) -> Optional[int]:
    """Smallest t >= 1 with (A_t, B_t) = (A_0, B_0), or None within max_steps."""
    A0, B0 = _validate_rows(config, A0, B0)
    max_steps = 4 * config.N * config.q if max_steps is None else max_steps
    A, B = A0, B0
    for t in range(1, max_steps + 1):
        A, B = step(config, A, B)
        if np.array_equal(A, A0) and np.array_equal(B, B0):
            return t
    return None


# Closed forms and classical automata -----------------------------------------

def single_x_wedge(q: int, T: int, N: Optional[int] = None) -> CaGrid:
    """
    Analytic checkerboard wedge for a single X at the origin (alpha = delta = 0,
    Fdagger): b = 1 on |x| <= t with x + t even, a = -1 on |x| <= t with x + t odd.
    The origin sits at site N // 2; N defaults to 2T + 1.
    """
    N = 2 * T + 1 if N is None else N
    if N < 2 * T + 1:
        logger.warning(f"Wedge of {T} steps wraps on N={N}; closed form is only valid before wrap")
    config = CaConfig(q, N, 0, 0, "Fdagger")
    origin = N // 2
    x = np.arange(N) - origin
    A = np.zeros((T + 1, N), dtype=np.int64)
    B = np.zeros((T + 1, N), dtype=np.int64)
    for t in range(T + 1):
        inside = np.abs(x) <= t
        even = (x + t) % 2 == 0
        B[t, inside & even] = 1
        A[t, inside & ~even] = q - 1
    return CaGrid(config=config, A=A, B=B, meta={"origin": origin})


def light_cone_radius(grid: CaGrid, origin: int) -> np.ndarray:
    """Largest ring distance from origin of the support at each t (-1 if empty)."""
    N = grid.config.N
    distance = np.abs(np.arange(N) - origin)
    distance = np.minimum(distance, N - distance)
    support = (grid.A != 0) | (grid.B != 0)
    radius = np.where(support, distance[None, :], -1)
    return radius.max(axis=1)


def _check_rule150r(q: int, *rows, variant: str) -> List[np.ndarray]:
    if variant not in RULE150R_VARIANTS:
        raise ValueError(f"❌ Unknown variant '{variant}'\n✅ Supported: {', '.join(RULE150R_VARIANTS)}")
    arrays = [np.mod(np.asarray(r, dtype=np.int64), q) for r in rows]
    if len({a.shape for a in arrays}) != 1:
        raise ShapeError("❌ Rule 150R rows must have equal lengths")
    return arrays


def rule150r_step(q: int, s_prev, s_curr, sign_variant: str = "minus") -> np.ndarray:
    """
    Second-order update on a ring.
    minus:      s+ = -s_{x-1} - s_{x+1} + s_prev
    plus-minus: s+ =  s_{x-1} + s_{x+1} - s_prev
    """
    s_prev, s_curr = _check_rule150r(q, s_prev, s_curr, variant=sign_variant)
    neighbors = neighbor_sum(s_curr)
    if sign_variant == "minus":
        return np.mod(-neighbors + s_prev, q)
    return np.mod(neighbors - s_prev, q)


def rule150r_reverse(q: int, s_curr, s_next, sign_variant: str = "minus") -> np.ndarray:
    """Recover s_prev from two consecutive rows."""
    s_curr, s_next = _check_rule150r(q, s_curr, s_next, variant=sign_variant)
    neighbors = neighbor_sum(s_curr)
    if sign_variant == "minus":
        return np.mod(s_next + neighbors, q)
    return np.mod(neighbors - s_next, q)


def rule150r_evolve(q: int, s0, s1, T: int, sign_variant: str = "minus") -> np.ndarray:
    """Rows s_0 .. s_T given the first two."""
    s0, s1 = _check_rule150r(q, s0, s1, variant=sign_variant)
    rows = [s0, s1]
    for _ in range(T - 1):
        rows.append(rule150r_step(q, rows[-2], rows[-1], sign_variant))
    return np.array(rows[:T + 1])


def alternate_sign_map(grid: CaGrid) -> CaGrid:
    """Negate a and b on odd sites; swaps the F and Fdagger variants (N even)."""
    cfg = grid.config
    if cfg.N % 2:
        raise ShapeError(f"❌ Alternate sign map needs even N on a ring, got N={cfg.N}")
    signs = np.where(np.arange(cfg.N) % 2 == 1, -1, 1)
    other = "Fdagger" if cfg.horizontal == "F" else "F"
    return CaGrid(config=cfg.with_variant(other),
                  A=np.mod(grid.A * signs, cfg.q),
                  B=np.mod(grid.B * signs, cfg.q),
                  meta=dict(grid.meta))


def product_state_step(q: int, labels, z_parity: int,
                       boundary: str = "periodic") -> Tuple[np.ndarray, int]:
    """
    Classical automaton on alternating Z/X product states (u_H = u_V = F).

    Sites with x % 2 == z_parity hold |z>, the others |x>_X = F|x>/sqrt(q).
    One step sends |z> to |z>_X and |x>_X to |-x - z_{x-1} - z_{x+1}>, so the
    parity of the Z sublattice flips. Open boundaries drop missing neighbours.
    """
    labels = np.mod(np.asarray(labels, dtype=np.int64), q)
    N = labels.size
    if boundary == "periodic" and N % 2:
        raise ShapeError(f"❌ Alternating pattern needs even N on a ring, got N={N}")
    is_z = np.arange(N) % 2 == z_parity % 2
    z_values = np.where(is_z, labels, 0)
    if boundary == "periodic":
        neighbors = neighbor_sum(z_values)
    else:
        padded = np.concatenate([[0], z_values, [0]])
        neighbors = padded[:-2] + padded[2:]
    new_labels = np.where(is_z, labels, np.mod(-labels - neighbors, q))
    return new_labels, 1 - z_parity % 2


def grid_to_gray(grid: CaGrid, field_name: str = "b") -> np.ndarray:
    """Residue v -> floor(255 v / (q - 1)) as uint8."""
    values = grid.B if field_name == "b" else grid.A
    q = grid.config.q
    return (255 * values // (q - 1)).astype(np.uint8)


def seed_row(config: CaConfig, kind: str = "X", site: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Single X (b=1) or single Z (a=1) at the middle site."""
    site = config.N // 2 if site is None else site
    A = np.zeros(config.N, dtype=np.int64)
    B = np.zeros(config.N, dtype=np.int64)
    if kind.upper() == "X":
        B[site] = 1
    elif kind.upper() == "Z":
        A[site] = 1
    else:
        raise ValueError(f"❌ Unknown seed kind '{kind}'\n✅ Supported: X, Z")
    return A, B
