# tests/test_lattice_config.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import logging

import pytest

from src.utils.errors import ConfigError, LatticeError
from src.utils.lattice_config import (build_run_config, get_default,
                                      load_config_file, parse_config_text)
from src.utils.logger import set_log_level, setup_logger


def test_parse_types_and_comments():
    text = """
    # fractal run
    q = 3
    alpha=2   # shear
    tol=1e-8
    variant=Fdagger
    weights=0.9,0.1
    report=true
    """
    options = parse_config_text(text)
    assert options == {"q": 3, "alpha": 2, "tol": 1e-8, "variant": "Fdagger",
                       "weights": "0.9,0.1", "report": True}


def test_dashes_become_underscores():
    assert parse_config_text("seed-kind=Z") == {"seed_kind": "Z"}


def test_malformed_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("q=2\njust words\n", source="run.cfg")
    assert "line 2" in str(info.value)
    assert isinstance(info.value, LatticeError)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "absent.cfg")


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("q=3\nsteps=10\nformat=csv\n")
    config = build_run_config("fractal", {"q": 5, "steps": None, "out": "x.csv"}, str(path))
    assert config.get("q") == 5
    assert config.get("steps") == 10
    assert config.format == "csv"
    assert config.output == "x.csv"


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("q=3\ncolour=blue\n")
    with pytest.raises(ConfigError):
        build_run_config("fractal", {}, str(path))
    with pytest.raises(ConfigError):
        build_run_config("charges", {"steps": 4})
    with pytest.raises(ConfigError):
        build_run_config("plot", {})


def test_common_keys_allowed_everywhere():
    config = build_run_config("check", {"seed": 7, "jobs": 2, "log_level": "DEBUG"})
    assert config.get("jobs") == 2
    assert config.format == "text"


def test_bad_format_rejected():
    with pytest.raises(ConfigError):
        build_run_config("fractal", {"format": "png"})


def test_defaults():
    assert get_default("dense_cap") == 4096
    assert get_default("ybe_tol") == 1e-8


def test_setup_logger_is_idempotent(tmp_path):
    log_file = str(tmp_path / "test.log")
    first = setup_logger("lattice_test_logger", log_file=log_file)
    second = setup_logger("lattice_test_logger", log_file=log_file)
    assert first is second
    assert len(second.handlers) == 2


def test_set_log_level(tmp_path):
    logger = setup_logger("lattice_level_logger", log_file=str(tmp_path / "level.log"))
    assert set_log_level("warning") == logging.WARNING
    assert logger.level == logging.WARNING
    set_log_level("INFO")
    with pytest.raises(ValueError):
        set_log_level("LOUD")


if __name__ == "__main__":
    print("🚀 Starting Configuration Test Suite")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Configuration: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
