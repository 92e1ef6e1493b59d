# src/services/statevector.py
"""
Exact dense simulation of the Hadamard lattice in the row/column, brickwork
and round-a-face presentations.

Basis states |z_0 ... z_{N-1}> are indexed by sum_x z_x q^{N-1-x}, so site 0
is the most significant digit and np.reshape(psi, (q,)*N) puts site x on axis x.
"""
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.services.chm import as_matrix, check_hadamard
from src.services.weyl import (SymplecticString, check_dense_dimension,
                               proportionality_factor, string_matrix)
from src.utils.errors import (NotAPauliStringError, PreconditionError,
                              ShapeError)
from src.utils.lattice_config import DEFAULTS
from src.utils.logger import setup_logger

logger = setup_logger("statevector")

BOUNDARIES = ("periodic", "open", "bond_removed")


@dataclass
class StateVector:
    q: int
    N: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.amplitudes.size != self.q ** self.N:
            raise ShapeError(f"❌ Expected {self.q ** self.N} amplitudes for q={self.q}, "
                             f"N={self.N}, got {self.amplitudes.size}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.q,) * self.N)

    def copy(self) -> "StateVector":
        return StateVector(self.q, self.N, self.amplitudes.copy())


@dataclass
class CircuitSpec:
    """
    Couplings and geometry of a lattice circuit.

    boundary "periodic" includes bond (N-1, 0); "open" omits it; "bond_removed"
    is periodic minus removed_bonds. removed_bonds may also be combined with
    "open". Bond x couples sites x and x+1 (mod N).
    """
    q: int
    N: int
    u_H: np.ndarray
    u_V: np.ndarray
    boundary: str = "periodic"
    removed_bonds: Tuple[int, ...] = ()
    T: int = 1
    name: str = ""

    def __post_init__(self):
        self.u_H = as_matrix(self.u_H)
        self.u_V = as_matrix(self.u_V)
        if self.u_H.shape != (self.q, self.q) or self.u_V.shape != (self.q, self.q):
            raise ShapeError(f"❌ Couplings must be {self.q}x{self.q}, got "
                             f"{self.u_H.shape} and {self.u_V.shape}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"❌ Unknown boundary '{self.boundary}'\n✅ Supported: {', '.join(BOUNDARIES)}")
        if self.N < 1:
            raise ShapeError(f"❌ N must be >= 1, got {self.N}")
        for label, M in (("u_H", self.u_H), ("u_V", self.u_V)):
            report = check_hadamard(M, DEFAULTS["hadamard_tol"])
            if not report.is_hadamard:
                raise PreconditionError(
                    f"❌ {label} is not a complex Hadamard matrix "
                    f"(modulus dev {report.max_modulus_deviation:.2e}, "
                    f"unitarity dev {report.max_unitarity_deviation:.2e})"
                )
        self.removed_bonds = tuple(int(b) % self.N for b in self.removed_bonds)

    @property
    def dim(self) -> int:
        return self.q ** self.N

    def bonds(self) -> List[Tuple[int, int]]:
        if self.N == 1:
            return []
        count = self.N - 1 if self.boundary == "open" else self.N
        return [(x, (x + 1) % self.N) for x in range(count) if x not in self.removed_bonds]


def basis_digits(q: int, N: int) -> np.ndarray:
    """Row i holds the site labels of basis state i, shape (q^N, N)."""
    return np.array(np.unravel_index(np.arange(q ** N), (q,) * N), dtype=np.int64).T


def digits_to_index(digits: np.ndarray, q: int) -> np.ndarray:
    N = digits.shape[-1]
    weights = q ** np.arange(N - 1, -1, -1)
    return (np.asarray(digits) * weights).sum(axis=-1)


# Row and column transfer matrices -------------------------------------------

def u_row_diagonal(spec: CircuitSpec) -> np.ndarray:
    """Diagonal of U_row: product of u_H(z_x, z_{x+1}) over the bonds present."""
    check_dense_dimension(spec.dim, DEFAULTS["state_cap"], what="state")
    digits = basis_digits(spec.q, spec.N)
    diagonal = np.ones(spec.dim, dtype=complex)
    for x, y in spec.bonds():
        diagonal *= spec.u_H[digits[:, x], digits[:, y]]
    return diagonal


def build_u_row(spec: CircuitSpec) -> np.ndarray:
    check_dense_dimension(spec.dim)
    return np.diag(u_row_diagonal(spec))


def build_u_vert(spec: CircuitSpec) -> np.ndarray:
    """(u_V / sqrt(q))^{tensor N}."""
    check_dense_dimension(spec.dim)
    single = spec.u_V / np.sqrt(spec.q)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(spec.N):
        out = np.kron(out, single)
    return out


def floquet(spec: CircuitSpec) -> np.ndarray:
    """U_vert U_row as a dense matrix."""
    check_dense_dimension(spec.dim)
    return build_u_vert(spec) @ build_u_row(spec)


def apply_local(tensor: np.ndarray, op: np.ndarray, sites: Sequence[int], q: int) -> np.ndarray:
    """Apply a k-site operator to the given axes of a (q,)*N (+ extra) tensor."""
    k = len(sites)
    op_t = op.reshape((q,) * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(sites)))
    return np.moveaxis(out, list(range(k)), list(sites))


def _check_state(spec: CircuitSpec, state: StateVector):
    if state.q != spec.q or state.N != spec.N:
        raise ShapeError(f"❌ State (q={state.q}, N={state.N}) does not match circuit "
                         f"(q={spec.q}, N={spec.N})")
    check_dense_dimension(spec.dim, DEFAULTS["state_cap"], what="state")


def apply_row(spec: CircuitSpec, state: StateVector, diagonal: Optional[np.ndarray] = None) -> StateVector:
    _check_state(spec, state)
    diagonal = u_row_diagonal(spec) if diagonal is None else diagonal
    return StateVector(spec.q, spec.N, diagonal * state.amplitudes)


def apply_vert(spec: CircuitSpec, state: StateVector, adjoint: bool = False) -> StateVector:
    _check_state(spec, state)
    single = spec.u_V / np.sqrt(spec.q)
    if adjoint:
        single = single.conj().T
    tensor = state.as_tensor()
    for x in range(spec.N):
        tensor = apply_local(tensor, single, [x], spec.q)
    return StateVector(spec.q, spec.N, tensor.ravel())


def apply_floquet(spec: CircuitSpec, state: StateVector, T: Optional[int] = None,
                  inverse: bool = False) -> StateVector:
    """
    Apply (U_vert U_row)^T site by site, never forming the dense power.

    inverse=True applies (U_row^dagger U_vert^dagger)^T.
    """
    T = spec.T if T is None else T
    _check_state(spec, state)
    diagonal = u_row_diagonal(spec)
    out = state.copy()
    for _ in range(T):
        if inverse:
            out = apply_vert(spec, out, adjoint=True)
            out = apply_row(spec, out, diagonal.conj())
        else:
            out = apply_row(spec, out, diagonal)
            out = apply_vert(spec, out)
    return out


# Brickwork and round-a-face gates -------------------------------------------

def brickwork_gate(u_H, u_V) -> np.ndarray:
    """
    Two-site gate gate[(a,b),(c,d)] = u_H(a,b) u_V(a,c) u_V(b,d) u_H(c,d) / q,
    i.e. D_H (u_V x u_V) D_H / q with D_H = diag(u_H(a,b)).
    """
    u_H, u_V = as_matrix(u_H), as_matrix(u_V)
    for label, M in (("u_H", u_H), ("u_V", u_V)):
        if not check_hadamard(M).is_hadamard:
            raise PreconditionError(f"❌ {label} is not a complex Hadamard matrix")
    q = u_H.shape[0]
    gate = (u_H[:, :, None, None] * u_V[:, None, :, None]
            * u_V[None, :, None, :] * u_H[None, None, :, :]) / q
    return gate.reshape(q * q, q * q)


def dual_reshuffle(U: np.ndarray, q: int) -> np.ndarray:
    """Space-time swap: U~[(d,b),(c,a)] = U[(a,b),(c,d)]."""
    return U.reshape(q, q, q, q).transpose(3, 1, 2, 0).reshape(q * q, q * q)


def is_unitary(U: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) < tol)


def is_dual_unitary(U: np.ndarray, q: int, tol: float = 1e-10) -> bool:
    return is_unitary(U, tol) and is_unitary(dual_reshuffle(U, q), tol)


def face_gate(u_NW, u_NE, u_SW, u_SE, control_a: int, control_c: int) -> np.ndarray:
    """
    Round-a-face update of one qudit controlled by its two neighbours.

    G[b, d] = (1/q) sum_e u_NW(a,e) u_NE(b,e) u_SE(c,e) u_SW(d,e): the
    horizontal-leg matrices u_NW, u_SE carry the controls a, c; u_NE carries
    the output b and u_SW the input d. With all four equal to F the gate maps
    d to b = -a - c - d.
    """
    mats = [as_matrix(m) for m in (u_NW, u_NE, u_SW, u_SE)]
    u_nw, u_ne, u_sw, u_se = mats
    q = u_nw.shape[0]
    a, c = control_a % q, control_c % q
    weights = u_nw[a, :] * u_se[c, :]
    return np.einsum("e,be,de->bd", weights, u_ne, u_sw) / q


def place_operator(op: np.ndarray, sites: Sequence[int], q: int, N: int) -> np.ndarray:
    """Dense q^N matrix of op acting on the listed sites (in that order)."""
    dim = q ** N
    check_dense_dimension(dim)
    identity = np.eye(dim, dtype=complex).reshape((q,) * N + (dim,))
    return apply_local(identity, np.asarray(op, dtype=complex), sites, q).reshape(dim, dim)


def brickwork_layer(gate: np.ndarray, q: int, N: int, parity: int) -> np.ndarray:
    """Product of gates on bonds (x, x+1 mod N) with x = parity mod 2 (N even)."""
    if N % 2:
        raise ShapeError(f"❌ Brickwork layers need even N, got {N}")
    dim = q ** N
    check_dense_dimension(dim)
    tensor = np.eye(dim, dtype=complex).reshape((q,) * N + (dim,))
    for x in range(parity % 2, N, 2):
        tensor = apply_local(tensor, gate, [x, (x + 1) % N], q)
    return tensor.reshape(dim, dim)


def presentation_check(u_H, u_V, q: int, N: int, T: int) -> float:
    """
    Deviation between the brickwork circuit (L_odd L_even)^T and the row/column
    form D_odd (U_vert U_row)^{2T} D_odd^dagger, where D_odd is the product of
    horizontal phases on odd bonds (the boundary unitary).
    """
    gate = brickwork_gate(u_H, u_V)
    layers = brickwork_layer(gate, q, N, 1) @ brickwork_layer(gate, q, N, 0)
    brick = np.linalg.matrix_power(layers, T)

    spec = CircuitSpec(q, N, u_H, u_V, boundary="periodic")
    F = floquet(spec)
    digits = basis_digits(q, N)
    d_odd = np.ones(q ** N, dtype=complex)
    for x in range(1, N, 2):
        d_odd *= spec.u_H[digits[:, x], digits[:, (x + 1) % N]]
    row_col = (d_odd[:, None] * np.linalg.matrix_power(F, 2 * T)) * d_odd.conj()[None, :]
    return float(np.max(np.abs(brick - row_col)))


# States and comparisons -------------------------------------------------------

def x_basis_state(q: int, x: int) -> np.ndarray:
    """|x>_X = (1/sqrt q) sum_z w^{zx} |z>."""
    z = np.arange(q)
    return np.exp(2j * np.pi * (z * x % q) / q) / np.sqrt(q)


def product_state(q: int, labels: Sequence[int], bases: Optional[Sequence[str]] = None) -> StateVector:
    """Tensor product of |z> (basis 'Z') and |x>_X (basis 'X') single-site states."""
    bases = ["Z"] * len(labels) if bases is None else list(bases)
    if len(bases) != len(labels):
        raise ShapeError("❌ labels and bases must have equal length")
    vector = np.ones(1, dtype=complex)
    for label, basis in zip(labels, bases):
        if basis.upper() == "Z":
            single = np.zeros(q, dtype=complex)
            single[int(label) % q] = 1.0
        else:
            single = x_basis_state(q, int(label))
        vector = np.kron(vector, single)
    return StateVector(q, len(labels), vector)


def product_of_sites(q: int, site_states: Iterable[np.ndarray]) -> StateVector:
    """Tensor product of arbitrary single-site vectors."""
    vector = np.ones(1, dtype=complex)
    count = 0
    for single in site_states:
        vector = np.kron(vector, np.asarray(single, dtype=complex))
        count += 1
    return StateVector(q, count, vector)


def plus_state(q: int) -> np.ndarray:
    return np.ones(q, dtype=complex) / np.sqrt(q)


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>| for normalized inputs."""
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)))


def equal_up_to_phase(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> bool:
    return proportionality_factor(np.asarray(A), np.asarray(B), tol) is not None


def conjugate_pauli(U: np.ndarray, s: SymplecticString,
                    threshold: Optional[float] = None) -> Tuple[SymplecticString, complex]:
    """
    Return (s', lam) with U P_s U^dagger = lam P_{s'} by projecting onto the
    Pauli basis: c_{a,b} = q^{-N} sum_j w^{-a.j} M[j, j+b].
    """
    threshold = DEFAULTS["pauli_threshold"] if threshold is None else threshold
    q, N = s.q, s.N
    dim = q ** N
    U = np.asarray(U, dtype=complex)
    if U.shape != (dim, dim):
        raise ShapeError(f"❌ Unitary has shape {U.shape}, expected {(dim, dim)}")
    check_dense_dimension(dim)
    start_time = time.time()

    M = U @ string_matrix(s) @ U.conj().T
    digits = basis_digits(q, N)
    shifted = digits_to_index((digits[:, None, :] + digits[None, :, :]) % q, q)
    # gathered[b, j] = M[j, j + b]
    gathered = M[np.arange(dim)[None, :], shifted]
    spectrum = np.fft.fftn(gathered.reshape((dim,) + (q,) * N), axes=list(range(1, N + 1)))
    coefficients = spectrum.reshape(dim, dim) / dim

    magnitudes = np.abs(coefficients)
    hits = np.argwhere(magnitudes > threshold)
    if len(hits) != 1:
        order = np.argsort(magnitudes.ravel())[::-1][:5]
        top = []
        for flat in order:
            b_idx, a_idx = np.unravel_index(flat, magnitudes.shape)
            top.append((tuple(digits[a_idx].tolist()), tuple(digits[b_idx].tolist()),
                        complex(coefficients[b_idx, a_idx])))
        raise NotAPauliStringError(
            f"❌ Conjugated operator spreads over {len(hits)} Pauli strings (threshold {threshold:g})",
            top_coefficients=top,
        )
    b_idx, a_idx = hits[0]
    logger.debug(f"conjugate_pauli q={q} N={N} finished in {time.time() - start_time:.4f}s")
    return SymplecticString(q, digits[a_idx], digits[b_idx]), complex(coefficients[b_idx, a_idx])
