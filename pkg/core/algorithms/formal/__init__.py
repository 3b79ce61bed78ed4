"""
Formal geometry algorithms: Jacobian inversion, the connection 1-form,
Taylor pullbacks and the flatness, closedness, homotopy, family and volume
checks.

Usage:
    from core.algorithms.formal import FormalGeometry
    R = FormalGeometry.compute_R(phi)
    FormalGeometry.check_flatness(R)
"""

from .formal_geometry import FormalGeometry, matrix_multiply, partial_derivation

__all__ = ['FormalGeometry', 'matrix_multiply', 'partial_derivation']
