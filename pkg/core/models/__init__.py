"""
Models package for graded algebra, BV and AKSZ data structures.

This package provides the immutable value types the algorithms work on:
- GradedCoordinate, CoordinateSystem: Named coordinates with ghost degree
- Scalar, Poly, Derivation: Exact polynomials over Q[hbar, hbar^-1, i]
- ConstantSymplectic, BVLaplacian: Constant structures and the BV Laplacian
- FormalExpMap, ConnectionOneForm, FormalVolume: Formal geometry data
- SourceModel, EmbeddingModel: Finite cdga models of source manifolds
- TargetSpec, LieStructure, LinftyAlgebra, QBundleSpec: Target data
- FiniteBVTheory: A BV theory on finitely many fields
- OperatorField, SampledLoopForm: Matrix-valued data for Wilson loops
- Report: Outcome of a check

Usage:
    from core.models import CoordinateSystem, Poly
    system = CoordinateSystem.from_specs([("x", 0), ("xs", -1)])
    S = Poly.coordinate(system, "x") * Poly.coordinate(system, "xs")
"""

from .connection_one_form import ConnectionOneForm, FormalVolume
from .derivation import Derivation
from .embedding_model import EmbeddingModel
from .finite_bv_theory import FiniteBVTheory
from .formal_exp_map import FormalExpMap
from .graded_coordinate import BASE, FIBER, CoordinateSystem, GradedCoordinate
from .lie_structure import LieStructure
from .linfty_algebra import LinftyAlgebra
from .monomial import Monomial
from .operator_field import OperatorField
from .poly import Poly
from .qbundle_spec import QBundleSpec
from .report import FAIL, PASS, PRECONDITION_FAILED, UNSUPPORTED, Report
from .sampled_loop_form import SampledLoopForm
from .scalar import Scalar
from .source_model import SourceModel
from .symplectic import BVLaplacian, ConstantSymplectic
from .target_spec import TargetSpec

__all__ = [
    'GradedCoordinate', 'CoordinateSystem', 'BASE', 'FIBER',
    'Monomial', 'Scalar', 'Poly', 'Derivation',
    'ConstantSymplectic', 'BVLaplacian',
    'FormalExpMap', 'ConnectionOneForm', 'FormalVolume',
    'SourceModel', 'EmbeddingModel',
    'TargetSpec', 'LieStructure', 'LinftyAlgebra', 'QBundleSpec',
    'FiniteBVTheory', 'OperatorField', 'SampledLoopForm',
    'Report', 'PASS', 'FAIL', 'PRECONDITION_FAILED', 'UNSUPPORTED',
]
