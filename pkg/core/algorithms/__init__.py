"""
Algorithms package for graded BV and AKSZ computations.

Domain packages:
- graded: GradedAlgebra, FiberIntegration
- bv: BVOperations
- formal: FormalGeometry
- aksz: AKSZTargets, Transgression, FormalGlobal, Linfty
- observables: QBundles, PreObservables, QuantumObservables, WilsonLoops, WilsonSurfaces

Usage:
    # Import from domain package
    from core.algorithms.aksz import Transgression

    # Or import from main package (convenience)
    from core.algorithms import Transgression
"""

from .aksz import AKSZTargets, FormalGlobal, Linfty, Transgression
from .bv import BVOperations
from .formal import FormalGeometry
from .graded import FiberIntegration, GradedAlgebra
from .observables import PreObservables, QBundles, QuantumObservables, WilsonLoops, WilsonSurfaces

__all__ = [
    'GradedAlgebra', 'FiberIntegration',
    'BVOperations',
    'FormalGeometry',
    'AKSZTargets', 'Transgression', 'FormalGlobal', 'Linfty',
    'QBundles', 'PreObservables', 'QuantumObservables', 'WilsonLoops', 'WilsonSurfaces',
]
