"""
Exception types shared by every gbv module.

All of them derive from ValueError so callers that only care about
"bad input" can catch a single type, as the models have always done.
"""

from typing import Optional


class GradedAlgebraError(ValueError):
    """Raised for coordinate-system mismatches, odd powers and degree errors."""


class ValidationError(ValueError):
    """Raised when a model (target, source model, bundle, ...) is invalid."""


class UnsupportedIntegralError(ValueError):
    """Raised when a fiber integral is neither Berezin nor Gaussian."""


class ParseError(ValueError):
    """
    Raised by the expression and theory-file parsers.

    Carries 1-based line and column of the offending token.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}line {line}, column {column}: {message}")
