# src/services/weyl.py
"""
Generalized Pauli (Weyl-Heisenberg) algebra over Z_q.

Conventions: Z = diag(w^j), X = sum_j |j><j+1|, so (Z^a X^b)_{jk} = w^{aj}
when k = j+b mod q, and X Z = w Z X with w = exp(2 pi i / q). Exponent-level
operations drop phases; the matrix oracles check proportionality only.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.services.chm import cat_hadamard, shear_matrix
from src.utils.errors import PreconditionError, ResourceError, ShapeError
from src.utils.lattice_config import DEFAULTS
from src.utils.logger import setup_logger

logger = setup_logger("weyl")


@dataclass(frozen=True)
class PauliExponent:
    """Z^a X^b on one qudit, exponents stored as canonical residues."""
    q: int
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"❌ q must be >= 2, got {self.q}")
        object.__setattr__(self, "a", int(self.a) % self.q)
        object.__setattr__(self, "b", int(self.b) % self.q)

    def as_tuple(self) -> Tuple[int, int]:
        return self.a, self.b


class SymplecticString:
    """
    Pauli string prod_x Z_x^{a_x} X_x^{b_x} up to phase, sites 0..N-1.

    Text form: "q N" on the first line, then the a-row and the b-row.
    """

    def __init__(self, q: int, A, B):
        A = np.asarray(A, dtype=np.int64).ravel()
        B = np.asarray(B, dtype=np.int64).ravel()
        if A.shape != B.shape:
            raise ShapeError(f"❌ A and B lengths differ: {A.size} vs {B.size}")
        if q < 2:
            raise ValueError(f"❌ q must be >= 2, got {q}")
        self.q = int(q)
        self.A = np.mod(A, q)
        self.B = np.mod(B, q)

    @property
    def N(self) -> int:
        return self.A.size

    @classmethod
    def identity(cls, q: int, N: int) -> "SymplecticString":
        return cls(q, np.zeros(N, dtype=np.int64), np.zeros(N, dtype=np.int64))

    @classmethod
    def single_site(cls, q: int, N: int, site: int, a: int = 0, b: int = 0) -> "SymplecticString":
        A = np.zeros(N, dtype=np.int64)
        B = np.zeros(N, dtype=np.int64)
        A[site % N] = a
        B[site % N] = b
        return cls(q, A, B)

    def is_identity(self) -> bool:
        return not (self.A.any() or self.B.any())

    def site(self, x: int) -> PauliExponent:
        return PauliExponent(self.q, int(self.A[x]), int(self.B[x]))

    def compose(self, other: "SymplecticString") -> "SymplecticString":
        """Product of strings: exponents add mod q."""
        self._check_compatible(other)
        return SymplecticString(self.q, self.A + other.A, self.B + other.B)

    def power(self, n: int) -> "SymplecticString":
        return SymplecticString(self.q, n * self.A, n * self.B)

    def shift(self, k: int) -> "SymplecticString":
        """Translate by k sites on the ring."""
        return SymplecticString(self.q, np.roll(self.A, k), np.roll(self.B, k))

    def support(self) -> np.ndarray:
        return np.flatnonzero((self.A != 0) | (self.B != 0))

    def to_text(self) -> str:
        return (f"{self.q} {self.N}\n"
                + " ".join(str(v) for v in self.A) + "\n"
                + " ".join(str(v) for v in self.B) + "\n")

    @classmethod
    def from_text(cls, text: str) -> "SymplecticString":
        lines = [line.split() for line in text.strip().splitlines() if line.strip()]
        if len(lines) != 3 or len(lines[0]) != 2:
            raise ValueError("❌ Expected 'q N' header followed by an a-row and a b-row")
        q, n = int(lines[0][0]), int(lines[0][1])
        A, B = [int(v) for v in lines[1]], [int(v) for v in lines[2]]
        if len(A) != n or len(B) != n:
            raise ShapeError(f"❌ Rows must have {n} entries, got {len(A)} and {len(B)}")
        return cls(q, A, B)

    def _check_compatible(self, other: "SymplecticString"):
        if self.q != other.q or self.N != other.N:
            raise ShapeError(f"❌ Incompatible strings: (q={self.q}, N={self.N}) vs "
                             f"(q={other.q}, N={other.N})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymplecticString):
            return NotImplemented
        return (self.q == other.q and self.N == other.N
                and np.array_equal(self.A, other.A) and np.array_equal(self.B, other.B))

    def __hash__(self):
        return hash((self.q, tuple(self.A.tolist()), tuple(self.B.tolist())))

    def __repr__(self) -> str:
        return f"SymplecticString(q={self.q}, A={self.A.tolist()}, B={self.B.tolist()})"


@dataclass(frozen=True)
class CatMatrix2x2:
    """Integer 2x2 matrix of unit determinant acting on (a, b) column vectors."""
    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        det = self.alpha * self.delta - self.beta * self.gamma
        if det != 1:
            raise PreconditionError(f"❌ Cat matrix must have determinant 1, got {det}")

    @classmethod
    def from_cat(cls, alpha: int, delta: int) -> "CatMatrix2x2":
        """Exponent map induced by conjugation with C(alpha, delta)."""
        return cls(alpha, alpha * delta - 1, 1, delta)

    def compose(self, other: "CatMatrix2x2") -> "CatMatrix2x2":
        """self after other."""
        m = self.as_array() @ other.as_array()
        return CatMatrix2x2(int(m[0, 0]), int(m[0, 1]), int(m[1, 0]), int(m[1, 1]))

    def apply(self, p: PauliExponent) -> PauliExponent:
        return PauliExponent(p.q, self.alpha * p.a + self.beta * p.b,
                             self.gamma * p.a + self.delta * p.b)

    def as_array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]], dtype=np.int64)

    def trace(self) -> int:
        return self.alpha + self.delta


def z_matrix(q: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(q) / q))


def x_matrix(q: int) -> np.ndarray:
    """Cyclic shift with X|k> = |k-1>."""
    return np.roll(np.eye(q, dtype=complex), 1, axis=1)


def pauli_matrix(p: PauliExponent) -> np.ndarray:
    q = p.q
    j = np.arange(q)
    M = np.zeros((q, q), dtype=complex)
    M[j, (j + p.b) % q] = np.exp(2j * np.pi * ((p.a * j) % q) / q)
    return M


def check_dense_dimension(dim: int, cap: Optional[int] = None, what: str = "operator"):
    """Refuse dense objects above the configured cap."""
    cap = DEFAULTS["dense_cap"] if cap is None else cap
    if dim > cap:
        item = 16 * dim * dim if what == "operator" else 16 * dim
        raise ResourceError(
            f"❌ Dense {what} of dimension {dim} exceeds cap {cap}\n"
            f"💡 Reduce N or raise the cap explicitly",
            required_bytes=item,
            cap=cap,
        )


def string_matrix(s: SymplecticString, cap: Optional[int] = None) -> np.ndarray:
    """Dense q^N x q^N matrix of a Pauli string; site 0 is the most significant digit."""
    check_dense_dimension(s.q ** s.N, cap)
    out = np.ones((1, 1), dtype=complex)
    for x in range(s.N):
        out = np.kron(out, pauli_matrix(s.site(x)))
    return out


def commutation_exponent(s1: SymplecticString, s2: SymplecticString) -> int:
    """k with P1 P2 = w^k P2 P1, the symplectic form of the exponent vectors."""
    s1._check_compatible(s2)
    return int(np.mod(np.dot(s1.B, s2.A) - np.dot(s1.A, s2.B), s1.q))


def proportionality_factor(A: np.ndarray, B: np.ndarray, tol: float = 1e-10) -> Optional[complex]:
    """Return lambda with A = lambda B and |lambda| = 1, or None."""
    norm = np.vdot(B, B)
    if abs(norm) < tol:
        return None
    lam = np.vdot(B, A) / norm
    if abs(abs(lam) - 1) > tol or np.max(np.abs(A - lam * B)) > tol:
        return None
    return complex(lam)


def conj_fourier(p: PauliExponent) -> PauliExponent:
    """F Z^a X^b F^dagger ~ Z^{-b} X^a; the phase is dropped."""
    return PauliExponent(p.q, -p.b, p.a)


def conj_shear(p: PauliExponent, alpha: int) -> PauliExponent:
    return PauliExponent(p.q, p.a + alpha * p.b, p.b)


def conj_cat(p: PauliExponent, alpha: int, delta: int) -> PauliExponent:
    return CatMatrix2x2.from_cat(alpha, delta).apply(p)


def two_site_kick(p1: PauliExponent, p2: PauliExponent, alpha: int,
                  delta: int) -> Tuple[PauliExponent, PauliExponent]:
    """Conjugation by the diagonal two-site coupling diag(C_{j1 j2}(alpha, delta))."""
    if p1.q != p2.q:
        raise ShapeError(f"❌ Sites have different q: {p1.q} vs {p2.q}")
    q = p1.q
    return (PauliExponent(q, p1.a - alpha * p1.b - p2.b, p1.b),
            PauliExponent(q, p2.a - delta * p2.b - p1.b, p2.b))


def shear_realisation(q: int, alpha: int) -> np.ndarray:
    """Matrix M with M P M^dagger ~ conj_shear(P, alpha)."""
    return shear_matrix(q, -alpha)


def cat_realisation(q: int, alpha: int, delta: int) -> np.ndarray:
    """Matrix M with M P M^dagger ~ conj_cat(P, alpha, delta)."""
    return cat_hadamard(q, -alpha, -delta)


def two_site_coupling(q: int, alpha: int, delta: int) -> np.ndarray:
    """diag over (j1, j2) of C_{j1 j2}(alpha, delta), a q^2 x q^2 matrix."""
    return np.diag(cat_hadamard(q, alpha, delta).ravel())
