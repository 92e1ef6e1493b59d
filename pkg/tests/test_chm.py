# tests/test_chm.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.services.chm import (builtin_pair, cat_hadamard, check_hadamard, dephase,
                              f4_family, fourier, hadamard_equivalent,
                              ising_phase_function, kicked_potts_integrable,
                              named_hadamard, permutation_equivalent,
                              require_hadamard, shear_matrix, sinkhorn_symmetric,
                              tensor)
from src.utils.errors import (ConvergenceError, InvalidDimensionError,
                              NumericalError, PreconditionError,
                              UnsupportedDimensionError)


@pytest.mark.parametrize("q", range(2, 9))
def test_fourier_is_hadamard(q):
    report = check_hadamard(fourier(q), 1e-12)
    assert report.is_hadamard
    assert report.is_symmetric


@pytest.mark.parametrize("name", ["K2", "K3", "F2xF2"])
def test_named_matrices_are_hadamard(name):
    assert check_hadamard(named_hadamard(name), 1e-12).is_hadamard


def test_dephase_recovers_fourier():
    assert np.max(np.abs(dephase(named_hadamard("K2")) - fourier(2))) < 1e-12
    assert np.max(np.abs(dephase(named_hadamard("K3")) - fourier(3))) < 1e-12


def test_dephase_is_idempotent():
    for M in (cat_hadamard(4, 1, 1), f4_family(0.7), sinkhorn_symmetric(5, seed=2)):
        once = dephase(M)
        assert np.allclose(once[0], 1) and np.allclose(once[:, 0], 1)
        assert np.max(np.abs(dephase(once) - once)) < 1e-12


def test_tensor_of_fourier_matrices_is_hadamard():
    M = tensor(fourier(2), fourier(3))
    assert M.shape == (6, 6)
    report = check_hadamard(M, 1e-12)
    assert report.is_hadamard
    assert report.max_unitarity_deviation < 1e-12
    assert report.max_modulus_deviation < 1e-12


def test_f4_family_orbit():
    for a in np.linspace(0, 2 * np.pi, 10, endpoint=False):
        assert check_hadamard(f4_family(a), 1e-12).is_hadamard
    assert np.allclose(f4_family(0.0), fourier(4))
    # the +-1 member of the orbit
    assert permutation_equivalent(f4_family(np.pi / 2), tensor(fourier(2), fourier(2)))
    assert not permutation_equivalent(fourier(4), named_hadamard("F2xF2"))


def test_hadamard_equivalence():
    assert hadamard_equivalent(named_hadamard("K2"), fourier(2))
    assert hadamard_equivalent(named_hadamard("K3"), fourier(3))
    assert not hadamard_equivalent(fourier(4), named_hadamard("F2xF2"))


def test_equivalence_search_is_bounded():
    with pytest.raises(UnsupportedDimensionError):
        permutation_equivalent(fourier(7), fourier(7))


def test_non_hadamard_rejected():
    assert not check_hadamard(np.ones((2, 2))).is_hadamard
    with pytest.raises(PreconditionError):
        require_hadamard(np.ones((3, 3)))
    with pytest.raises(InvalidDimensionError):
        fourier(1)


@pytest.mark.parametrize("q,alpha,delta", [(2, 1, 0), (3, 2, 2), (4, 1, 3), (5, 2, 4), (6, 1, 1)])
def test_cat_hadamard(q, alpha, delta):
    C = cat_hadamard(q, alpha, delta)
    assert check_hadamard(C).is_hadamard
    expected = shear_matrix(q, alpha) @ fourier(q) @ shear_matrix(q, delta)
    assert np.max(np.abs(C - expected)) < 1e-10


def test_cat_hadamard_reduces_to_fourier():
    assert np.allclose(cat_hadamard(5, 0, 0), fourier(5))


def test_ising_phase_functions():
    assert np.allclose(ising_phase_function("K2"), named_hadamard("K2"))
    assert np.allclose(ising_phase_function("F2"), fourier(2))


def test_kicked_potts_integrable_point():
    u_H, u_V = kicked_potts_integrable(1)
    assert check_hadamard(u_H).is_hadamard
    assert check_hadamard(u_V).is_hadamard
    K3 = named_hadamard("K3")
    assert np.allclose(u_H, np.exp(4j * np.pi / 9) * K3.conj().T)
    assert np.allclose(u_V, -1j * np.exp(4j * np.pi / 9) * K3)


@pytest.mark.parametrize("q", range(2, 8))
def test_sinkhorn_symmetric_outputs(q):
    for seed in range(10):
        M = sinkhorn_symmetric(q, seed=seed)
        report = check_hadamard(M, 1e-8)
        assert report.is_hadamard and report.is_symmetric, f"q={q} seed={seed}"
        if q == 2:
            assert hadamard_equivalent(M, fourier(2))


@pytest.mark.parametrize("seed", [4, 5, 9, 12, 14, 19])
def test_sinkhorn_recovers_from_plateaus(seed):
    report = check_hadamard(sinkhorn_symmetric(4, seed=seed), 1e-8)
    assert report.is_hadamard and report.is_symmetric


def test_sinkhorn_restarts_when_stuck(monkeypatch):
    from src.services import chm
    starts = []
    real_start = chm.random_start

    def counting_start(q, seed):
        starts.append(seed)
        return real_start(q, seed)

    monkeypatch.setattr(chm, "random_start", counting_start)
    monkeypatch.setitem(chm.DEFAULTS, "sinkhorn_window", 1)
    monkeypatch.setitem(chm.DEFAULTS, "sinkhorn_stall_ratio", 0.0)
    with pytest.raises(ConvergenceError) as info:
        sinkhorn_symmetric(4, seed=3, max_iter=6)
    assert info.value.iterations == 6
    assert starts == [3 + k * chm.SINKHORN_SEED_STRIDE for k in range(4)]
    assert "3 restarts" in str(info.value)


def test_sinkhorn_is_deterministic():
    assert np.array_equal(sinkhorn_symmetric(3, seed=7), sinkhorn_symmetric(3, seed=7))


def test_sinkhorn_errors():
    with pytest.raises(ConvergenceError) as info:
        sinkhorn_symmetric(5, seed=0, max_iter=1)
    assert info.value.iterations == 1
    with pytest.raises(NumericalError):
        sinkhorn_symmetric(3, initial=np.ones((3, 3)))


def test_sinkhorn_polishes_a_rounded_start():
    rounded = np.round(fourier(5), 2)
    M = sinkhorn_symmetric(5, initial=rounded)
    assert check_hadamard(M, 1e-8).is_hadamard


def test_builtin_names():
    assert np.allclose(builtin_pair("builtin:f3")[0], fourier(3))
    assert np.allclose(builtin_pair("f4a:0")[0], fourier(4))
    u_H, u_V = builtin_pair("cat:3:2:2")
    assert np.allclose(u_V, u_H.conj().T)
    assert np.allclose(builtin_pair("k3potts")[0], kicked_potts_integrable(1)[0])
    with pytest.raises(ValueError):
        builtin_pair("nope")


if __name__ == "__main__":
    print("🚀 Starting Hadamard Matrix Test Suite")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Hadamard matrices: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
