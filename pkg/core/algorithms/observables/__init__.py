"""
Observables: Q-bundles, auxiliary theories, effective actions and Wilson
loops and surfaces.

Classes:
    QBundles: Hamiltonian Q-bundle checks, the BF Wilson bundle, PSM vertical fields
    PreObservables: Auxiliary theories, pre-observable and obstruction checks
    QuantumObservables: Effective actions and the dQME
    WilsonLoops: Path-ordered exponentials, loop traces, quantum flatness
    WilsonSurfaces: The BF Wilson surface action and its check

Usage:
    from core.algorithms.observables import QBundles, PreObservables
    spec = QBundles.build_bf_wilson_bundle(g, 3)
    aux = PreObservables.transgress_auxiliary(spec, ambient, emb)
    PreObservables.check_pre_observable(ambient, aux)
"""

from .auxiliary import AuxiliaryParts, FormalGlobalAuxiliary, PreObservables
from .qbundles import QBundles
from .quantum import QuantumObservables
from .wilson import WilsonLoops
from .wilson_surface import WilsonSurfaces

__all__ = [
    'QBundles',
    'PreObservables',
    'AuxiliaryParts',
    'FormalGlobalAuxiliary',
    'QuantumObservables',
    'WilsonLoops',
    'WilsonSurfaces',
]
