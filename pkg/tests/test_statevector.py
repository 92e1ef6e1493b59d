# tests/test_statevector.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.services.chm import (f4_family, fourier, kicked_potts_integrable,
                              named_hadamard)
from src.services.statevector import (CircuitSpec, StateVector, apply_floquet,
                                      basis_digits, brickwork_gate, build_u_vert,
                                      conjugate_pauli, digits_to_index,
                                      dual_reshuffle, equal_up_to_phase,
                                      face_gate, fidelity, floquet,
                                      is_dual_unitary, is_unitary, place_operator,
                                      presentation_check, product_state)
from src.services.symplectic_ca import CaConfig, evolve, product_state_step
from src.services.weyl import SymplecticString, cat_realisation, x_matrix
from src.utils.errors import (NotAPauliStringError, PreconditionError,
                              ResourceError, ShapeError)


def test_basis_indexing():
    digits = basis_digits(3, 3)
    assert digits[5].tolist() == [0, 1, 2]
    assert digits_to_index(digits, 3).tolist() == list(range(27))


def test_bonds():
    F = fourier(2)
    assert CircuitSpec(2, 4, F, F, boundary="open").bonds() == [(0, 1), (1, 2), (2, 3)]
    spec = CircuitSpec(2, 4, F, F, removed_bonds=(1,))
    assert spec.bonds() == [(0, 1), (2, 3), (3, 0)]


def test_circuit_spec_rejects_bad_couplings():
    with pytest.raises(PreconditionError):
        CircuitSpec(2, 3, np.ones((2, 2)), fourier(2))
    with pytest.raises(ShapeError):
        CircuitSpec(2, 3, fourier(3), fourier(3))
    with pytest.raises(ValueError):
        CircuitSpec(2, 3, fourier(2), fourier(2), boundary="twisted")


def test_state_length_checked():
    with pytest.raises(ShapeError):
        StateVector(2, 3, np.ones(7))


def test_apply_floquet_matches_dense_power():
    u_H, u_V = kicked_potts_integrable(1)
    spec = CircuitSpec(3, 4, u_H, u_V)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=81) + 1j * rng.normal(size=81)
    state = StateVector(3, 4, psi / np.linalg.norm(psi))
    evolved = apply_floquet(spec, state, 3)
    dense = np.linalg.matrix_power(floquet(spec), 3) @ state.amplitudes
    assert np.max(np.abs(evolved.amplitudes - dense)) < 1e-10
    back = apply_floquet(spec, evolved, 3, inverse=True)
    assert fidelity(back, state) > 1 - 1e-10


def test_floquet_is_unitary():
    F = fourier(3)
    assert is_unitary(floquet(CircuitSpec(3, 3, F, F.conj().T)))


@pytest.mark.parametrize("u_H,u_V", [
    (fourier(2), fourier(2)),
    (fourier(3), fourier(3).conj().T),
    (named_hadamard("K3"), fourier(3)),
    (f4_family(0.3), f4_family(0.3).conj().T),
    kicked_potts_integrable(1),
])
def test_brickwork_gate_is_dual_unitary(u_H, u_V):
    q = u_H.shape[0]
    gate = brickwork_gate(u_H, u_V)
    assert is_dual_unitary(gate, q)


def test_dual_reshuffle_is_an_involution_on_indices():
    gate = brickwork_gate(fourier(3), fourier(3))
    assert np.allclose(dual_reshuffle(dual_reshuffle(gate, 3), 3), gate)


@pytest.mark.parametrize("q,T", [(2, 1), (2, 2), (3, 1)])
def test_presentation_equivalence(q, T):
    F = fourier(q)
    assert presentation_check(F, F.conj().T, q, 4, T) < 1e-10


def test_presentation_equivalence_kicked_potts():
    u_H, u_V = kicked_potts_integrable(1)
    assert presentation_check(u_H, u_V, 3, 4, 1) < 1e-10


def test_face_gate_permutations():
    F = fourier(3)
    for a in range(3):
        for c in range(3):
            G = face_gate(F, F, F, F, a, c)
            expected = np.zeros((3, 3))
            for d in range(3):
                expected[(-a - c - d) % 3, d] = 1
            assert np.allclose(G, expected)
            G = face_gate(F.conj(), F, F, F.conj(), a, c)
            expected = np.zeros((3, 3))
            for d in range(3):
                expected[(a + c - d) % 3, d] = 1
            assert np.allclose(G, expected)


def test_place_operator():
    X = x_matrix(2)
    assert np.allclose(place_operator(X, [0], 2, 2), np.kron(X, np.eye(2)))
    assert np.allclose(place_operator(X, [1], 2, 2), np.kron(np.eye(2), X))


def test_conjugate_pauli_identity():
    s = SymplecticString(3, [1, 0], [2, 1])
    result, lam = conjugate_pauli(np.eye(9), s)
    assert result == s
    assert abs(lam - 1) < 1e-12


def test_conjugate_pauli_rejects_non_clifford():
    theta = 0.3
    rotation = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * x_matrix(2)
    U = np.kron(rotation, np.eye(2))
    with pytest.raises(NotAPauliStringError) as info:
        conjugate_pauli(U, SymplecticString(2, [1, 0], [0, 0]))
    assert len(info.value.top_coefficients) == 5


@pytest.mark.parametrize("q,alpha,delta,variant", [
    (2, 1, 1, "F"), (2, 1, 0, "Fdagger"), (3, 2, 0, "Fdagger"), (3, 2, 2, "F"),
])
def test_automaton_matches_exact_conjugation(q, alpha, delta, variant):
    N = 4
    F = fourier(q)
    u_H = F if variant == "F" else F.conj().T
    U = floquet(CircuitSpec(q, N, u_H, cat_realisation(q, alpha, delta)))
    config = CaConfig(q, N, alpha, delta, variant)
    rng = np.random.default_rng(q * 7 + alpha)
    for _ in range(5):
        s = SymplecticString(q, rng.integers(0, q, N), rng.integers(0, q, N))
        grid = evolve(config, s.A, s.B, 3)
        current = s
        for t in range(1, 4):
            current, _ = conjugate_pauli(U, current)
            assert current == grid.string_at(t)


def test_product_states_map_to_product_states():
    q, N = 3, 4
    F = fourier(q)
    spec = CircuitSpec(q, N, F, F)
    for z_parity in (0, 1):
        bases = ["Z" if x % 2 == z_parity else "X" for x in range(N)]
        for flat in range(q ** N):
            labels = np.array(np.unravel_index(flat, (q,) * N))
            evolved = apply_floquet(spec, product_state(q, labels, bases), 1)
            new_labels, new_parity = product_state_step(q, labels, z_parity)
            new_bases = ["Z" if x % 2 == new_parity else "X" for x in range(N)]
            target = product_state(q, new_labels, new_bases)
            assert equal_up_to_phase(evolved.amplitudes, target.amplitudes, 1e-10)


def test_dense_cap_raises_resource_error():
    F = fourier(2)
    with pytest.raises(ResourceError) as info:
        build_u_vert(CircuitSpec(2, 13, F, F))
    assert info.value.required_bytes == 16 * 8192 * 8192


if __name__ == "__main__":
    print("🚀 Starting Statevector Test Suite")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Statevector: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
