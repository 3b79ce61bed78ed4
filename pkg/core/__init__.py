"""
Core package of gbv, a graded BV/AKSZ verification toolkit.

This package provides:
- Exact graded polynomial models (core.models)
- BV, formal geometry, AKSZ and observable algorithms (core.algorithms)
- Settings and error types (core.config, core.errors)

Usage:
    from core.models import SourceModel
    from core.algorithms import AKSZTargets, Transgression
"""

from .config import CONVENTION_VERSION, DEFAULT_SETTINGS, Settings
from .errors import GradedAlgebraError, ParseError, UnsupportedIntegralError, ValidationError

__version__ = "1.0.0"

__all__ = [
    'Settings', 'DEFAULT_SETTINGS', 'CONVENTION_VERSION',
    'GradedAlgebraError', 'ValidationError', 'UnsupportedIntegralError', 'ParseError',
]
