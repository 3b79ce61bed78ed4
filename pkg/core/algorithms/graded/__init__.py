"""
Graded algebra algorithms.

- GradedAlgebra: products, derivatives, derivation brackets, substitution
- FiberIntegration: Berezin integrals and Wick moments

Usage:
    from core.algorithms.graded import GradedAlgebra, FiberIntegration
"""

from .graded_algebra import GradedAlgebra
from .fiber_integration import FiberIntegration, all_pairings

__all__ = ['GradedAlgebra', 'FiberIntegration', 'all_pairings']
