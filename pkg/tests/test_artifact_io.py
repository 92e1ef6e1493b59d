# tests/test_artifact_io.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest
from PIL import Image

from src.services.artifact_io import (ArtifactWriter, load_circuit_spec,
                                      matrix_from_text, read_matrix, read_string,
                                      resolve_hadamard, resolve_pair,
                                      state_from_text, state_to_text,
                                      write_matrix, write_string)
from src.services.chm import fourier, kicked_potts_integrable
from src.services.entanglement import growth_check
from src.services.statevector import product_state
from src.services.symplectic_ca import CaConfig, evolve, seed_row, single_x_wedge
from src.services.weyl import SymplecticString
from src.utils.errors import ConfigError, ShapeError


@pytest.fixture
def writer():
    return ArtifactWriter()


@pytest.fixture
def fractal_grid():
    config = CaConfig(3, 9, 1, 0)
    return evolve(config, *seed_row(config), 4)


def test_supported_formats(writer):
    assert writer.is_supported_format("grid.PGM")
    assert not writer.is_supported_format("grid.png")


def test_grid_csv(writer, fractal_grid, tmp_path):
    path = tmp_path / "nested" / "grid.csv"
    stats = writer.write_grid(fractal_grid, str(path))
    assert stats['status'] == 'success'
    assert stats['rows_written'] == 5
    assert writer.read_grid_csv(str(path)).tolist() == fractal_grid.B.tolist()


def test_grid_csv_a_field(writer, fractal_grid, tmp_path):
    path = tmp_path / "grid_a.csv"
    writer.write_grid_csv(fractal_grid, str(path), field_name="a")
    assert writer.read_grid_csv(str(path)).tolist() == fractal_grid.A.tolist()


def test_grid_pgm(writer, tmp_path):
    grid = single_x_wedge(2, 6)
    path = tmp_path / "wedge.pgm"
    stats = writer.write_grid(grid, str(path), fmt="pgm")
    assert path.read_bytes().startswith(b"P5")
    with Image.open(path) as image:
        assert image.mode == 'L'
        assert image.size == (grid.config.N, 7)
        pixels = np.array(image)
    assert pixels.tolist() == (255 * grid.B).tolist()
    assert stats['gray_levels'] == 2


def test_grid_text(writer, fractal_grid, tmp_path):
    path = tmp_path / "grid.txt"
    writer.write_grid(fractal_grid, str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0].split() == [str(v) for v in fractal_grid.B[0]]


def test_unsupported_grid_format(writer, fractal_grid, tmp_path):
    with pytest.raises(ValueError):
        writer.write_grid(fractal_grid, str(tmp_path / "grid.png"))


def test_profile_csv(writer, tmp_path):
    profile = growth_check(2, 8, 2, "Xprod")
    path = tmp_path / "profile.csv"
    writer.write_profile_csv(profile, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,entropy"
    assert len(lines) == 4
    assert float(lines[1].split(",")[1]) == 0.0
    assert float(lines[3].split(",")[1]) == pytest.approx(2 * np.log(2))


def test_ybe_csv(writer, tmp_path):
    rows = [{'q': 3, 'seed': 0, 'residual': 1e-14, 'pass': True, 'status': 'success'},
            {'q': 3, 'seed': 1, 'residual': float("nan"), 'pass': None,
             'status': 'sinkhorn failed: ConvergenceError'}]
    path = tmp_path / "ybe.csv"
    writer.write_ybe_csv(rows, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "q,seed,residual,pass,status"
    assert lines[1].endswith(",true,success")
    assert lines[2] == "3,1,nan,,sinkhorn failed: ConvergenceError"


def test_matrix_file(tmp_path):
    M = fourier(4) * np.exp(0.3j)
    path = tmp_path / "m.txt"
    write_matrix(M, str(path))
    assert path.read_text().splitlines()[0] == "dim 4"
    assert np.max(np.abs(read_matrix(str(path)) - M)) < 1e-15


def test_matrix_text_shape_checked():
    with pytest.raises(ShapeError):
        matrix_from_text("dim 2\n1+0i 1+0i\n")
    with pytest.raises(FileNotFoundError):
        read_matrix("/nonexistent/matrix.txt")


def test_state_text():
    state = product_state(3, [0, 2], ["Z", "X"])
    text = state_to_text(state)
    assert text.splitlines()[0] == "3 2"
    assert np.allclose(state_from_text(text).amplitudes, state.amplitudes)


def test_string_file(tmp_path):
    s = SymplecticString(3, [1, 0, 2], [0, 2, 1])
    path = tmp_path / "s.txt"
    write_string(s, str(path))
    assert read_string(str(path)) == s


def test_resolve_pair_builtin():
    u_H, u_V = resolve_pair("builtin:k3potts")
    expected = kicked_potts_integrable(1)
    assert np.allclose(u_H, expected[0]) and np.allclose(u_V, expected[1])
    assert np.allclose(resolve_hadamard("f3"), fourier(3))


def test_resolve_pair_from_file(tmp_path):
    M = fourier(3)
    write_matrix(M, str(tmp_path / "h.txt"))
    u_H, u_V = resolve_pair("h.txt", base_dir=str(tmp_path))
    assert np.allclose(u_H, M)
    assert np.allclose(u_V, M.conj().T)


def test_load_circuit_spec_builtin(tmp_path):
    path = tmp_path / "potts.cfg"
    path.write_text("# kicked Potts ring\nq=3\nN=4\nu_H=builtin:k3potts\nboundary=open\n"
                    "removed_bonds=1,2\nT=2\n")
    spec = load_circuit_spec(str(path))
    assert (spec.q, spec.N, spec.T) == (3, 4, 2)
    assert spec.boundary == "open"
    assert spec.removed_bonds == (1, 2)
    assert spec.name == "potts"


def test_load_circuit_spec_relative_matrix(tmp_path):
    write_matrix(fourier(2), str(tmp_path / "f2.txt"))
    path = tmp_path / "ring.cfg"
    path.write_text("q=2\nN=3\nu_H=f2.txt\n")
    spec = load_circuit_spec(str(path))
    assert np.allclose(spec.u_H, fourier(2))
    assert spec.boundary == "periodic"
    assert spec.removed_bonds == ()


def test_load_circuit_spec_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("q=2\nN=3\nu_H=f2\ncolor=red\n")
    with pytest.raises(ConfigError):
        load_circuit_spec(str(path))
    path.write_text("q=2\nN=3\n")
    with pytest.raises(ConfigError):
        load_circuit_spec(str(path))
    with pytest.raises(ConfigError):
        load_circuit_spec(str(tmp_path / "missing.cfg"))


if __name__ == "__main__":
    print("🚀 Starting Artifact IO Test Suite")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Artifact IO: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
