"""
Exception hierarchy for the solver toolkit.

Every error raised on purpose by tsfcde derives from TsfcdeError, so the CLI
can catch one type and turn it into a nonzero exit code.
"""

from typing import Optional


class TsfcdeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(TsfcdeError, ValueError):
    """An argument lies outside its mathematical domain."""


class ConfigError(TsfcdeError, ValueError):
    """Invalid run configuration; `key` names the offending field."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class ProblemSpecError(TsfcdeError, ValueError):
    """The problem definition violates an assumption of the scheme."""


class DimensionError(TsfcdeError, ValueError):
    """Vector or matrix sizes do not agree."""


class SingularOperatorError(TsfcdeError, ArithmeticError):
    """A circulant eigenvalue or LU pivot is (numerically) zero."""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message)


class GsfInapplicableError(SingularOperatorError):
    """The Gohberg-Semencul inverse needs xi_0 != 0."""


class SolverError(TsfcdeError):
    """Krylov solver failure."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        self.iteration = iteration
        super().__init__(message)


class BreakdownError(SolverError):
    """An inner-product denominator vanished."""


class DivergenceError(SolverError):
    """NaN or Inf appeared in the iterates."""


class SteppingError(TsfcdeError):
    """A failure inside a time-stepping driver, tagged with its level."""

    def __init__(self, level: int, cause: Exception):
        self.level = level
        self.cause = cause
        super().__init__(f"time level j={level}: {cause}")
