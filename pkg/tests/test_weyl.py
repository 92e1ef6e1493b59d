# tests/test_weyl.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.services.chm import fourier
from src.services.weyl import (CatMatrix2x2, PauliExponent, SymplecticString,
                               cat_realisation, commutation_exponent,
                               conj_cat, conj_fourier, conj_shear, pauli_matrix,
                               proportionality_factor, shear_realisation,
                               string_matrix, two_site_coupling, two_site_kick,
                               x_matrix, z_matrix)
from src.utils.errors import PreconditionError, ResourceError, ShapeError


def _conjugated(U, P):
    return U @ P @ U.conj().T


def _clifford_parameters(q):
    # odd shears at odd q pick up a sign on wrap-around
    return range(q) if q % 2 == 0 else range(0, q, 2)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_clock_and_shift_relation(q):
    Z, X = z_matrix(q), x_matrix(q)
    omega = np.exp(2j * np.pi / q)
    assert np.allclose(X @ Z, omega * Z @ X)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_pauli_matrix_matches_powers(q):
    Z, X = z_matrix(q), x_matrix(q)
    for a in range(q):
        for b in range(q):
            expected = np.linalg.matrix_power(Z, a) @ np.linalg.matrix_power(X, b)
            assert np.allclose(pauli_matrix(PauliExponent(q, a, b)), expected)


def test_exponents_are_normalized():
    p = PauliExponent(3, -1, 5)
    assert p.as_tuple() == (2, 2)


def test_string_algebra():
    s = SymplecticString(3, [1, 0, 2], [0, 1, 1])
    t = SymplecticString(3, [2, 2, 0], [1, 0, 1])
    assert s.compose(t) == SymplecticString(3, [0, 2, 2], [1, 1, 2])
    assert s.power(3).is_identity()
    assert s.shift(1) == SymplecticString(3, [2, 1, 0], [1, 0, 1])
    assert s.support().tolist() == [0, 1, 2]
    assert SymplecticString.from_text(s.to_text()) == s
    with pytest.raises(ShapeError):
        s.compose(SymplecticString.identity(3, 4))


def test_commutation_exponent_matches_matrices():
    q, N = 3, 2
    omega = np.exp(2j * np.pi / q)
    rng = np.random.default_rng(4)
    for _ in range(10):
        s1 = SymplecticString(q, rng.integers(0, q, N), rng.integers(0, q, N))
        s2 = SymplecticString(q, rng.integers(0, q, N), rng.integers(0, q, N))
        P1, P2 = string_matrix(s1), string_matrix(s2)
        k = commutation_exponent(s1, s2)
        assert np.allclose(P1 @ P2, omega ** k * P2 @ P1)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_conj_fourier(q):
    F = fourier(q) / np.sqrt(q)
    for a in range(q):
        for b in range(q):
            p = PauliExponent(q, a, b)
            lhs = _conjugated(F, pauli_matrix(p))
            assert proportionality_factor(lhs, pauli_matrix(conj_fourier(p))) is not None


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_conj_shear(q):
    for alpha in _clifford_parameters(q):
        S = shear_realisation(q, alpha)
        for a in range(q):
            for b in range(q):
                p = PauliExponent(q, a, b)
                lhs = _conjugated(S, pauli_matrix(p))
                assert proportionality_factor(lhs, pauli_matrix(conj_shear(p, alpha))) is not None


@pytest.mark.parametrize("q", [2, 3, 4])
def test_conj_cat(q):
    for alpha in _clifford_parameters(q):
        for delta in _clifford_parameters(q):
            C = cat_realisation(q, alpha, delta) / np.sqrt(q)
            for a in range(q):
                for b in range(q):
                    p = PauliExponent(q, a, b)
                    lhs = _conjugated(C, pauli_matrix(p))
                    expected = pauli_matrix(conj_cat(p, alpha, delta))
                    assert proportionality_factor(lhs, expected) is not None


def test_conj_cat_exponent_level_at_odd_alpha():
    assert conj_cat(PauliExponent(3, 1, 0), 1, 0).as_tuple() == (1, 1)
    assert conj_cat(PauliExponent(3, 0, 1), 1, 0).as_tuple() == (2, 0)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_two_site_kick(q):
    for alpha in _clifford_parameters(q):
        for delta in _clifford_parameters(q):
            D = two_site_coupling(q, alpha, delta)
            rng = np.random.default_rng(q * 10 + alpha + delta)
            for _ in range(6):
                p1 = PauliExponent(q, *rng.integers(0, q, 2))
                p2 = PauliExponent(q, *rng.integers(0, q, 2))
                lhs = _conjugated(D, np.kron(pauli_matrix(p1), pauli_matrix(p2)))
                r1, r2 = two_site_kick(p1, p2, alpha, delta)
                expected = np.kron(pauli_matrix(r1), pauli_matrix(r2))
                assert proportionality_factor(lhs, expected) is not None


def test_cat_matrix_composition():
    m = CatMatrix2x2.from_cat(2, 3)
    assert m.as_array().tolist() == [[2, 5], [1, 3]]
    assert m.compose(CatMatrix2x2.from_cat(0, 0)).as_array().tolist() == [[5, -2], [3, -1]]
    with pytest.raises(PreconditionError):
        CatMatrix2x2(1, 1, 1, 1)


@pytest.mark.parametrize("alpha", range(-3, 6))
@pytest.mark.parametrize("delta", range(-3, 6))
def test_cat_matrix_transpose_has_unit_determinant(alpha, delta):
    T = CatMatrix2x2.from_cat(alpha, delta).as_array().T
    assert T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0] == 1
    J = np.array([[0, 1], [-1, 0]])
    assert np.array_equal(T.T @ J @ T, J)


def test_dense_cap():
    with pytest.raises(ResourceError) as info:
        string_matrix(SymplecticString.identity(2, 13))
    assert info.value.cap == 4096


def test_proportionality_factor_rejects_mismatch():
    assert proportionality_factor(z_matrix(3), x_matrix(3)) is None
    lam = proportionality_factor(1j * z_matrix(3), z_matrix(3))
    assert abs(lam - 1j) < 1e-12


if __name__ == "__main__":
    print("🚀 Starting Pauli Algebra Test Suite")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Pauli algebra: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
