"""
Lattice toolkit configuration, output paths and run-config parsing
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from src.utils.errors import ConfigError

# Get project root directory
PROJECT_ROOT = Path(__file__).parent.parent.parent
OUTPUT_DIR = PROJECT_ROOT / "outputs"

# Create directories if they don't exist
OUTPUT_DIR.mkdir(exist_ok=True)
(OUTPUT_DIR / "fractals").mkdir(exist_ok=True)
(OUTPUT_DIR / "reports").mkdir(exist_ok=True)
(OUTPUT_DIR / "matrices").mkdir(exist_ok=True)

# Numerical defaults shared by every service
DEFAULTS = {
    "hadamard_tol": 1e-8,
    "exact_tol": 1e-12,
    "pauli_threshold": 1e-8,
    "sinkhorn_tol": 1e-10,
    "sinkhorn_max_iter": 20000,
    "sinkhorn_window": 200,
    "sinkhorn_stall_ratio": 0.8,
    "sinkhorn_kick": 0.1,
    "dense_cap": 4096,
    "state_cap": 65536,
    "ybe_tol": 1e-8,
    "ybe_decisive": 1e-2,
    "eigen_clip": 1e-9,
}

COMMON_KEYS = {"log_level", "seed", "jobs", "config"}

# Keys each CLI command accepts from flags or a config file
COMMAND_KEYS = {
    "fractal": {"q", "alpha", "delta", "variant", "steps", "width", "seed_kind",
                "grid", "out", "format"},
    "rainbow": {"q", "n", "uh", "report"},
    "ybe-scan": {"q", "seeds", "tol", "out", "max_iter"},
    "entropy": {"q", "n", "steps", "initial", "weights", "renyi", "base", "out"},
    "charges": {"q", "n", "uh", "kmax"},
    "check": {"suite"},
}

OUTPUT_FORMATS = ("csv", "pgm", "text")


@dataclass
class RunConfig:
    """Resolved options for one CLI invocation."""
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    format: str = "text"

    def get(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)


def _coerce(raw: str) -> Any:
    """Type a config value; PyYAML leaves exponent floats like 1e-8 as strings."""
    value = yaml.safe_load(raw)
    if isinstance(value, str):
        for cast in (int, float):
            try:
                return cast(value)
            except ValueError:
                continue
    return value


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse key=value lines with # comments."""
    options = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(
                f"❌ Malformed config line {line_no} in {source}: {line!r}\n"
                f"💡 Expected key=value"
            )
        key, raw = stripped.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"❌ Empty key on line {line_no} in {source}")
        options[key] = _coerce(raw.strip()) if raw.strip() else None
    return options


def load_config_file(path) -> Dict[str, Any]:
    """Read a key=value config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"❌ Config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def build_run_config(command: str, cli_options: Dict[str, Any],
                     config_path: Optional[str] = None) -> RunConfig:
    """
    Merge config file and CLI flags for a command; flags win.

    Args:
        command: CLI sub-command name
        cli_options: flag values, None meaning "not given"
        config_path: optional key=value file

    Returns:
        RunConfig with unknown keys rejected
    """
    if command not in COMMAND_KEYS:
        raise ConfigError(f"❌ Unknown command: {command}")
    allowed = COMMAND_KEYS[command] | COMMON_KEYS

    merged = {}
    if config_path:
        merged.update(load_config_file(config_path))
    for key, value in cli_options.items():
        if value is not None:
            merged[key.replace("-", "_")] = value

    unknown = sorted(set(merged) - allowed)
    if unknown:
        raise ConfigError(
            f"❌ Unknown keys for '{command}': {', '.join(unknown)}\n"
            f"✅ Allowed: {', '.join(sorted(allowed))}"
        )

    fmt = merged.get("format", "text")
    if fmt not in OUTPUT_FORMATS:
        raise ConfigError(f"❌ Unsupported format '{fmt}'. Supported: {OUTPUT_FORMATS}")

    merged.pop("config", None)
    return RunConfig(command=command, options=merged, output=merged.get("out"), format=fmt)


def get_default(key: str) -> Any:
    """Get a numerical default"""
    return DEFAULTS[key]


def get_output_directory(kind: str = "") -> str:
    """Get output directory path"""
    return str(OUTPUT_DIR / kind) if kind else str(OUTPUT_DIR)
