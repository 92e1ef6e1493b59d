# src/services/artifact_io.py
import csv
import os
import time
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from src.services.chm import as_matrix, builtin_pair
from src.services.entanglement import EntropyProfile
from src.services.statevector import CircuitSpec, StateVector
from src.services.symplectic_ca import CaGrid, grid_to_gray
from src.services.weyl import SymplecticString
from src.utils.errors import ConfigError, ShapeError
from src.utils.lattice_config import parse_config_text
from src.utils.logger import setup_logger

logger = setup_logger("artifact_io")

CIRCUIT_KEYS = {"q", "N", "T", "boundary", "u_H", "u_V", "removed_bonds"}


class ArtifactWriter:
    """
    Reads and writes every artifact the toolkit produces.
    Grids: .csv, .pgm, .txt; matrices, states and strings: plain text.
    """

    SUPPORTED_FORMATS = ['.csv', '.pgm', '.txt']
    FORMAT_SUFFIX = {'csv': '.csv', 'pgm': '.pgm', 'text': '.txt'}

    def is_supported_format(self, file_path: str) -> bool:
        """Check if file format is supported."""
        return Path(file_path).suffix.lower() in self.SUPPORTED_FORMATS

    def _prepare(self, output_path: str) -> Path:
        path = Path(output_path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_grid_csv(self, grid: CaGrid, output_path: str, field_name: str = "b") -> Dict:
        """
        One row per time step of b-values (or a-values).

        Args:
            grid: Evolved grid
            output_path: Path of the CSV file
            field_name: "b" or "a"

        Returns:
            Write statistics
        """
        try:
            start_time = time.time()
            path = self._prepare(output_path)
            values = grid.B if field_name == "b" else grid.A
            with open(path, 'w', encoding='utf-8', newline='') as f:
                writer = csv.writer(f)
                writer.writerows(values.tolist())
            stats = {
                'output_file': str(path),
                'rows_written': int(values.shape[0]),
                'columns': int(values.shape[1]),
                'processing_time': round(time.time() - start_time, 2),
                'status': 'success'
            }
            logger.info(f"Grid CSV written: {path}")
            return stats
        except Exception as e:
            logger.error(f"Grid CSV export failed for {output_path}: {str(e)}")
            raise

    def write_grid_pgm(self, grid: CaGrid, output_path: str, field_name: str = "b") -> Dict:
        """8-bit binary PGM, residue v -> floor(255 v / (q-1))."""
        try:
            start_time = time.time()
            path = self._prepare(output_path)
            gray = grid_to_gray(grid, field_name)
            Image.fromarray(gray).save(path, format='PPM')
            stats = {
                'output_file': str(path),
                'width': int(gray.shape[1]),
                'height': int(gray.shape[0]),
                'gray_levels': int(len(np.unique(gray))),
                'processing_time': round(time.time() - start_time, 2),
                'status': 'success'
            }
            logger.info(f"Grid PGM written: {path}")
            return stats
        except Exception as e:
            logger.error(f"Grid PGM export failed for {output_path}: {str(e)}")
            raise

    def write_grid_text(self, grid: CaGrid, output_path: str, field_name: str = "b") -> Dict:
        start_time = time.time()
        path = self._prepare(output_path)
        values = grid.B if field_name == "b" else grid.A
        path.write_text("\n".join(" ".join(str(v) for v in row) for row in values) + "\n",
                        encoding='utf-8')
        return {'output_file': str(path), 'rows_written': int(values.shape[0]),
                'processing_time': round(time.time() - start_time, 2), 'status': 'success'}

    def write_grid(self, grid: CaGrid, output_path: str, fmt: Optional[str] = None,
                   field_name: str = "b") -> Dict:
        """Route by explicit format or by file suffix."""
        suffix = self.FORMAT_SUFFIX.get(fmt) if fmt else Path(output_path).suffix.lower()
        if suffix not in self.SUPPORTED_FORMATS:
            raise ValueError(f"❌ Unsupported grid format. Supported: {self.SUPPORTED_FORMATS}")
        if suffix == '.csv':
            return self.write_grid_csv(grid, output_path, field_name)
        if suffix == '.pgm':
            return self.write_grid_pgm(grid, output_path, field_name)
        return self.write_grid_text(grid, output_path, field_name)

    def write_profile_csv(self, profile: EntropyProfile, output_path: str) -> Dict:
        """Columns t,entropy."""
        path = self._prepare(output_path)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['t', 'entropy'])
            for t, value in zip(profile.times, profile.values):
                writer.writerow([t, repr(float(value))])
        logger.info(f"Entropy profile written: {path}")
        return {'output_file': str(path), 'rows_written': len(profile.values), 'status': 'success'}

    def write_ybe_csv(self, rows: Sequence[Dict], output_path: str) -> Dict:
        """Columns q,seed,residual,pass,status; pass is empty for unconverged seeds."""
        path = self._prepare(output_path)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=['q', 'seed', 'residual', 'pass', 'status'])
            writer.writeheader()
            for row in rows:
                writer.writerow({**row, 'residual': repr(float(row['residual'])),
                                 'pass': '' if row['pass'] is None else str(bool(row['pass'])).lower()})
        logger.info(f"YBE scan written: {path}")
        return {'output_file': str(path), 'rows_written': len(rows), 'status': 'success'}

    def read_grid_csv(self, input_path: str) -> np.ndarray:
        if not os.path.exists(input_path):
            raise FileNotFoundError(f"Input file not found: {input_path}")
        with open(input_path, 'r', encoding='utf-8') as f:
            return np.array([[int(v) for v in row] for row in csv.reader(f) if row], dtype=np.int64)


# Plain-text encodings ---------------------------------------------------------

def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex(token: str) -> complex:
    return complex(token.replace("i", "j"))


def matrix_to_text(M: np.ndarray) -> str:
    M = as_matrix(M)
    lines = [f"dim {M.shape[0]}"]
    lines += [" ".join(format_complex(z) for z in row) for row in M]
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = [line.split() for line in text.strip().splitlines() if line.strip()]
    if not lines:
        raise ValueError("❌ Empty matrix file")
    header = lines[0]
    dim = int(header[-1])
    rows = lines[1:]
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ShapeError(f"❌ Expected {dim} rows of {dim} entries")
    return np.array([[parse_complex(tok) for tok in row] for row in rows], dtype=complex)


def state_to_text(state: StateVector) -> str:
    lines = [f"{state.q} {state.N}"]
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in state.amplitudes]
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> StateVector:
    lines = [line.split() for line in text.strip().splitlines() if line.strip()]
    q, n = int(lines[0][0]), int(lines[0][1])
    amplitudes = np.array([float(re) + 1j * float(im) for re, im in lines[1:]], dtype=complex)
    return StateVector(q, n, amplitudes)


def write_matrix(M: np.ndarray, path: str) -> None:
    Path(path).write_text(matrix_to_text(M), encoding='utf-8')


def read_matrix(path: str) -> np.ndarray:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Matrix file not found: {path}")
    return matrix_from_text(Path(path).read_text(encoding='utf-8'))


def write_string(s: SymplecticString, path: str) -> None:
    Path(path).write_text(s.to_text(), encoding='utf-8')


def read_string(path: str) -> SymplecticString:
    return SymplecticString.from_text(Path(path).read_text(encoding='utf-8'))


# Hadamard and circuit resolution ------------------------------------------------

def resolve_hadamard(value: str, base_dir: Optional[str] = None) -> np.ndarray:
    """builtin:<name>, a bare builtin name, or a matrix text file."""
    return resolve_pair(value, None, base_dir)[0]


def resolve_pair(u_H: str, u_V: Optional[str] = None,
                 base_dir: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Resolve u_H and u_V; a builtin u_H supplies its own partner when u_V is absent."""
    def _one(value: str) -> Tuple[np.ndarray, np.ndarray]:
        value = str(value).strip()
        candidate = Path(base_dir) / value if base_dir else Path(value)
        if not value.startswith("builtin:") and candidate.is_file():
            M = read_matrix(str(candidate))
            return M, M.conj().T
        return builtin_pair(value)

    h_matrix, partner = _one(u_H)
    v_matrix = partner if u_V is None else _one(u_V)[0]
    return h_matrix, v_matrix


def _parse_bonds(raw) -> Tuple[int, ...]:
    if raw is None or raw == "":
        return ()
    if isinstance(raw, int):
        return (raw,)
    return tuple(int(tok) for tok in str(raw).replace(" ", "").split(",") if tok)


def load_circuit_spec(path: str) -> CircuitSpec:
    """
    Read a key=value circuit description.

    Keys: q, N, T, boundary, u_H, u_V, removed_bonds. u_H and u_V are
    builtin:<name> or matrix files relative to the config file.
    """
    if not os.path.exists(path):
        raise ConfigError(f"❌ Circuit file not found: {path}")
    options = parse_config_text(Path(path).read_text(encoding='utf-8'), source=str(path))
    unknown = sorted(set(options) - CIRCUIT_KEYS)
    if unknown:
        raise ConfigError(f"❌ Unknown circuit keys: {', '.join(unknown)}\n"
                          f"✅ Allowed: {', '.join(sorted(CIRCUIT_KEYS))}")
    for required in ("q", "N", "u_H"):
        if required not in options:
            raise ConfigError(f"❌ Circuit file {path} is missing '{required}'")

    u_H, u_V = resolve_pair(options["u_H"], options.get("u_V"), str(Path(path).parent))
    spec = CircuitSpec(
        q=int(options["q"]),
        N=int(options["N"]),
        u_H=u_H,
        u_V=u_V,
        boundary=str(options.get("boundary", "periodic")),
        removed_bonds=_parse_bonds(options.get("removed_bonds")),
        T=int(options.get("T", 1)),
        name=Path(path).stem,
    )
    logger.info(f"Loaded circuit {spec.name}: q={spec.q} N={spec.N} boundary={spec.boundary}")
    return spec
