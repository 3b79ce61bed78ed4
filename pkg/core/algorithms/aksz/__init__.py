"""
AKSZ algorithms package.

Classes:
    AKSZTargets: Builders for Poisson sigma model and BF targets
    ModelValued: Polynomials with values in a source model
    Transgression: Transgression of targets over finite source models
    FormalGlobal: Formal global split actions and the dCME check
    FormalGlobalAction: Result of a formal global construction
    Linfty: Chevalley-Eilenberg differentials and L-infinity algebras

Usage:
    from core.algorithms.aksz import AKSZTargets, Transgression
    target = AKSZTargets.build_psm_target(pi, 3)
    theory = Transgression.transgress(target, SourceModel.torus(2))
"""

from .formal_global import FormalGlobal, FormalGlobalAction, fluctuation_name
from .linfty import Linfty
from .model_valued import ModelValued, parity_parts
from .targets import AKSZTargets
from .transgression import Transgression

__all__ = [
    'AKSZTargets',
    'ModelValued',
    'parity_parts',
    'Transgression',
    'FormalGlobal',
    'FormalGlobalAction',
    'fluctuation_name',
    'Linfty',
]
