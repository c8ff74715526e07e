"""Error types shared across the package."""
from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration (bad scheme name, timestep over the stability bound, ...)."""


class NumericBlowupError(RuntimeError):
    """A step produced non-finite values.

    Carries ``iteration`` when raised from a driver loop (-1 if unknown).
    """

    def __init__(self, message: str, iteration: int = -1):
        super().__init__(message)
        self.iteration = iteration


class SolverError(RuntimeError):
    """Iterative linear solve failed to converge; carries the final relative residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ParseError(ValueError):
    """Malformed input file. ``offset`` is a byte offset for binary formats,
    ``line`` a 1-based line number for text formats (-1 when not applicable)."""

    def __init__(self, message: str, offset: int = -1, line: int = -1):
        super().__init__(message)
        self.offset = offset
        self.line = line
