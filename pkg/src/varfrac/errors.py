"""Exception taxonomy shared across the library.

The CLI maps these onto its exit codes, so new error conditions should
reuse one of the classes below rather than raising bare ValueErrors.
"""

from __future__ import annotations


class VarfracError(Exception):
    """Base class for all library errors."""


class DomainError(VarfracError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidityError(VarfracError, ValueError):
    """A declared invariant fails at runtime (order bounds, hypotheses)."""


class ConfigurationError(VarfracError):
    """An operation was invoked without the inputs it was configured to need."""


class ExpressionError(VarfracError):
    """Parse or compile failure in the expression mini-language."""

    def __init__(self, message: str, line: int = 1, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class OptimizationError(VarfracError):
    """The minimizer hit a non-finite objective; carries the offending point."""

    def __init__(self, message: str, coeffs=None):
        super().__init__(message)
        self.coeffs = None if coeffs is None else list(coeffs)
