# src/utils/errors.py
"""
Exception hierarchy for the lattice toolkit.

Every error raised by the services derives from LatticeError so the CLI can
map failures to exit codes in one place.
"""
from typing import List, Optional, Tuple


class LatticeError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidDimensionError(LatticeError, ValueError):
    """Local dimension or chain length outside the supported range."""

    exit_code = 2


class PreconditionError(LatticeError, ValueError):
    """Input violates a documented precondition (non-Hadamard, non-symmetric, ...)."""


class UnsupportedDimensionError(LatticeError):
    """Brute-force search requested beyond its dimension limit."""


class ShapeError(LatticeError, IndexError):
    """Vector lengths, cuts or operator supports do not fit the lattice."""


class ClassificationError(LatticeError):
    """Operation requires the other automaton class."""


class NumericalError(LatticeError):
    """Singular factors, negative spectra or non-finite values."""


class ConfigError(LatticeError, ValueError):
    """Malformed or unknown configuration keys."""

    exit_code = 2


class ConvergenceError(LatticeError):
    """Sinkhorn iteration did not reach the requested tolerance."""

    def __init__(self, message: str, last_deviation: float, iterations: int):
        super().__init__(message)
        self.last_deviation = last_deviation
        self.iterations = iterations


class ResourceError(LatticeError):
    """Requested dense object exceeds the configured dimension cap."""

    exit_code = 3

    def __init__(self, message: str, required_bytes: int, cap: int):
        super().__init__(message)
        self.required_bytes = required_bytes
        self.cap = cap


class NotAPauliStringError(LatticeError):
    """Conjugated operator spreads over more than one Pauli string."""

    def __init__(self, message: str,
                 top_coefficients: Optional[List[Tuple[Tuple[int, ...], Tuple[int, ...], complex]]] = None):
        super().__init__(message)
        self.top_coefficients = top_coefficients or []
