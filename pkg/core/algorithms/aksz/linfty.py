"""
Chevalley-Eilenberg differentials and L-infinity algebras.

    Q = -1/2 f^k_ij xi^i xi^j d/dxi^k          (xi of degree 1)
    (d_CE F)(X_0, ..., X_n) = sum_{i<j} (-1)^{i+j} F([X_i, X_j], X_0, ..., ^i, ^j, ..., X_n)

An n-cochain F corresponds to sum_{j1<...<jn} xi^j1 ... xi^jn F_{j1...jn},
and Q acting on that polynomial matches d_CE F.
"""

import logging
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Dict, Mapping, Optional, Sequence, Tuple

from ...errors import ValidationError
from ...models.derivation import Derivation
from ...models.graded_coordinate import BASE, CoordinateSystem, GradedCoordinate
from ...models.lie_structure import LieStructure
from ...models.linfty_algebra import LinftyAlgebra, bracket_sign
from ...models.poly import Poly
from ...models.report import Report
from ...models.source_model import SourceModel
from ...models.symplectic import ConstantSymplectic
from ..bv.bv_operations import BVOperations
from ..formal.formal_geometry import permutation_sign
from .model_valued import ModelValued
from .transgression import Transgression

logger = logging.getLogger(__name__)

Cochain = Dict[Tuple[int, ...], Fraction]


class Linfty:
    """Static CE and L-infinity operations."""

    # ------------------------------------------------------------ CE layer

    @staticmethod
    def ce_system(g: LieStructure) -> CoordinateSystem:
        """Degree 1 coordinates xi_<label>."""
        return CoordinateSystem([GradedCoordinate(LinftyAlgebra.shifted_name(label), 1, BASE)
                                 for label in g.labels])

    @staticmethod
    def ce_differential(g: LieStructure) -> Derivation:
        """The Chevalley-Eilenberg vector field of the bracket constants."""
        system = Linfty.ce_system(g)
        names = system.names
        comps: Dict[str, Poly] = {}
        for (k, i, j), value in g.items():
            term = Poly.coordinate(system, names[i]) * Poly.coordinate(system, names[j]) * (-value / 2)
            comps[names[k]] = comps[names[k]] + term if names[k] in comps else term
        return Derivation(system, 1, comps)

    @staticmethod
    def check_ce_square(g: LieStructure) -> Report:
        """[Q, Q] = 0, equivalent to the Jacobi identity."""
        q = Linfty.ce_differential(g)
        residual = dict(q.bracket(q).items())
        return Report.from_residual("ce_square", residual)

    @staticmethod
    def _cochain_value(cochain: Cochain, indices: Tuple[int, ...]) -> Fraction:
        """Evaluate an antisymmetric cochain stored on increasing tuples."""
        if len(set(indices)) < len(indices):
            return Fraction(0)
        order = sorted(range(len(indices)), key=lambda r: indices[r])
        key = tuple(indices[r] for r in order)
        return cochain.get(key, Fraction(0)) * permutation_sign(tuple(order))

    @staticmethod
    def ce_cochain_differential(g: LieStructure, cochain: Cochain, arity: int) -> Cochain:
        """
        d_CE of an arity-n cochain with trivial coefficients.

        Args:
            cochain: Values on strictly increasing index tuples

        Raises:
            ValidationError: If a key is not a strictly increasing n-tuple
        """
        n = g.dimension
        for key in cochain:
            if len(key) != arity or list(key) != sorted(set(key)) or any(not 0 <= i < n for i in key):
                raise ValidationError(f"Cochain key {key} is not an increasing {arity}-tuple")
        result: Cochain = {}
        for args in combinations(range(n), arity + 1):
            total = Fraction(0)
            for i, j in combinations(range(arity + 1), 2):
                rest = tuple(args[r] for r in range(arity + 1) if r not in (i, j))
                sign = -1 if (i + j) % 2 else 1
                for k, value in g.bracket_vector({args[i]: 1}, {args[j]: 1}).items():
                    total += sign * value * Linfty._cochain_value(cochain, (k,) + rest)
            if total:
                result[args] = total
        return result

    @staticmethod
    def cochain_to_poly(cochain: Cochain, system: CoordinateSystem) -> Poly:
        """sum over increasing tuples of xi^j1 ... xi^jn F_{j1...jn}."""
        names = system.names
        result = Poly.zero(system)
        for key, value in cochain.items():
            mono = Poly.constant(system, value)
            for idx in key:
                mono = mono * Poly.coordinate(system, names[idx])
            result = result + mono
        return result

    @staticmethod
    def check_ce_dictionary(g: LieStructure, cochain: Cochain, arity: int) -> Report:
        """Compare Q acting on the polynomial of a cochain with d_CE of the cochain."""
        q = Linfty.ce_differential(g)
        system = q.system
        lhs = q.apply(Linfty.cochain_to_poly(cochain, system))
        rhs = Linfty.cochain_to_poly(Linfty.ce_cochain_differential(g, cochain, arity), system)
        return Report.from_residual("ce_dictionary", lhs - rhs)

    # ------------------------------------------------------- L-infinity layer

    @staticmethod
    def lie_algebra(g: LieStructure, cyclic: bool = True) -> LinftyAlgebra:
        """
        A Lie algebra as an L-infinity algebra concentrated in degree 0.

        Args:
            cyclic: Attach the invariant form as the cyclic structure

        Raises:
            ValidationError: If a cyclic structure is requested but the form is
                missing or degenerate
        """
        q = Linfty.ce_differential(g)
        omega = None
        if cyclic:
            names = q.system.names
            bivector = {(names[i], names[j]): v for (i, j), v in g.inverse_form().items()}
            omega = ConstantSymplectic(q.system, 2, bivector)
        return LinftyAlgebra(g.labels, [0] * g.dimension, q, omega, g.name)

    @staticmethod
    def extract_linfty(field: Derivation, labels: Optional[Sequence[str]] = None,
                       omega: Optional[ConstantSymplectic] = None, name: str = "") -> LinftyAlgebra:
        """
        Read the L-infinity brackets off a cohomological vector field.

        Raises:
            ValidationError: If [Q, Q] != 0
        """
        square = field.bracket(field)
        if not square.is_zero():
            raise ValidationError("Vector field does not square to zero")
        system = field.system
        labels = list(labels) if labels else [
            n[3:] if n.startswith("xi_") else n for n in system.names]
        degrees = [1 - c.degree for c in system]
        algebra = LinftyAlgebra(labels, degrees, field, omega, name)
        logger.debug("Extracted L-infinity algebra with arities %s", algebra.arities())
        return algebra

    @staticmethod
    def check_homotopy_jacobi(g: LinftyAlgebra, max_arity: Optional[int] = None) -> Report:
        """
        All homotopy Jacobi identities at once as [Q, Q] = 0.

        Raises:
            ValidationError: If a bracket exceeds the configured arity
        """
        arities = g.arities()
        if max_arity is not None and arities and arities[-1] > max_arity:
            raise ValidationError(f"Bracket of arity {arities[-1]} exceeds the maximum {max_arity}")
        report = Report.from_residual("homotopy_jacobi", dict(g.field.bracket(g.field).items()))
        report.add_note(f"arities {arities}")
        return report

    @staticmethod
    def forms_linfty(model: SourceModel, g: LinftyAlgebra, max_arity: Optional[int] = None) -> LinftyAlgebra:
        """
        The L-infinity algebra on model tensor g.

        The shifted coordinates are component fields xi^k_b of the superfield
        Xi^k = sum_b e_b xi^k_b and

            Q-hat xi^k_b = (-1)^{|b|} (Q^k(Xi) - d Xi^k)_b,

        the cyclic structure (when g has one) is the transgressed one.

        Raises:
            ValidationError: If g has brackets above the configured arity
        """
        arities = g.arities()
        if max_arity is not None and arities and arities[-1] > max_arity:
            raise ValidationError(f"Bracket of arity {arities[-1]} exceeds the maximum {max_arity}")
        coords, comps = Transgression.field_coordinates(g.system, model)
        system = CoordinateSystem(coords)
        fields = Transgression.superfields(system, model, comps)
        degrees = model.degrees
        components: Dict[str, Poly] = {}
        for name in g.system.names:
            image = ModelValued.evaluate(g.field.component(name), fields, model, system) - fields[name].differential()
            for b in range(len(model)):
                part = image.part(b)
                if not part.is_zero():
                    components[comps[(name, b)]] = part * (-1 if degrees[b] % 2 else 1)
        field = Derivation(system, 1, components)
        omega = None
        if g.omega is not None:
            bivector = Transgression.field_bivector(g.omega, model, comps)
            omega = ConstantSymplectic(system, g.omega.degree - model.dimension, bivector)
        labels = [f"{g.labels[g.system.index(mu)]}_{model.labels[a]}" for (mu, a) in comps]
        tensor_degrees = [g.degrees[g.system.index(mu)] + degrees[a] for (mu, a) in comps]
        return LinftyAlgebra(labels, tensor_degrees, field, omega, f"{model.name}*{g.name}")

    @staticmethod
    def hmc_action(g: LinftyAlgebra) -> Tuple[Poly, Report]:
        """
        The homotopy Maurer-Cartan action sum_j 1/(j+1)! <l_j(Psi, ..., Psi), Psi>
        of a cyclic L-infinity algebra, Psi = sum_i xi^i X_i.

        Over the shifted coordinates a bracket term reads

            s(m) eps(i) (-1)^|l_j(X_i)| <l_j(X_i1, ..., X_ij), X_m> xi^m xi^ij ... xi^i1 / (j+1)!

        with s(m) = (-1)^{|xi^m| n} for a pairing of degree n. The report
        combines its master equation with the check that its Hamiltonian
        vector field is the Q rebuilt from the brackets.

        Raises:
            ValidationError: If g has no nondegenerate cyclic structure
        """
        omega = g.omega
        if omega is None or len(omega.support) != g.dimension:
            raise ValidationError("Maurer-Cartan action needs a nondegenerate cyclic pairing")
        system = g.system
        names = system.names
        degrees = g.degrees
        shifted = system.degrees
        action = Poly.zero(system)
        for arity in g.arities():
            weight = Fraction(1, factorial(arity + 1))
            for indices, vector in g.table(arity).items():
                psi = Poly.constant(system, 1)
                for idx in reversed(indices):
                    psi = psi * Poly.coordinate(system, names[idx])
                sign = bracket_sign(arity, degrees, indices)
                if (sum(degrees[i] for i in indices) + arity) % 2:
                    sign = -sign
                for m in range(g.dimension):
                    value = sum((coeff * g.pairing(k, m) for k, coeff in vector.items()), Fraction(0))
                    if not value:
                        continue
                    s = -1 if (shifted[m] * omega.degree) % 2 else 1
                    action = action + Poly.coordinate(system, names[m]) * psi * (value * sign * s * weight)
        field = g.reconstruct_field()
        if not action.is_zero():
            field = field - BVOperations.hamiltonian_vf(omega, action)
        cme = BVOperations.check_master_equation(omega, action)
        vector = Report.from_residual("hamiltonian_vf", dict(field.items()))
        logger.debug("Maurer-Cartan action with %d terms", len(action))
        return action, Report.combine("hmc", [cme, vector])

    @staticmethod
    def mc_expression(g: LinftyAlgebra) -> Dict[str, Poly]:
        """Maurer-Cartan expression per generator, rebuilt from the bracket tables."""
        return dict(g.reconstruct_field().items())

    @staticmethod
    def check_linfty_mc(g: LinftyAlgebra, action: Optional[Poly] = None) -> Report:
        """
        Euler-Lagrange equations of the Maurer-Cartan action against the
        Maurer-Cartan expression built from the brackets.

        For every generator k: sum_mu (S right-derived by mu) w^{mu k} = MC^k.

        Raises:
            ValidationError: If g has no cyclic structure
        """
        if g.omega is None:
            raise ValidationError("Maurer-Cartan equations need a cyclic structure")
        if action is None:
            action, _ = Linfty.hmc_action(g)
        mc = Linfty.mc_expression(g)
        system = g.system
        residuals: Dict[str, Poly] = {}
        for k in system.names:
            variation = Poly.zero(system)
            for mu, nu, value in g.omega.bivector_items():
                if nu == k:
                    variation = variation + action.right_derive(mu) * value
            residual = variation - mc.get(k, Poly.zero(system))
            if not residual.is_zero():
                residuals[k] = residual
        return Report.from_residual("linfty_mc", residuals)

    @staticmethod
    def is_graded_symmetric_pairing(g: LinftyAlgebra, pairs: Mapping[Tuple[int, int], object] = None) -> bool:
        """
        Check <X_i, X_j> = (-1)^{|X_i||X_j|} <X_j, X_i> on index pairs (default: all).
        """
        n = g.dimension
        degrees = g.degrees
        pairs = pairs or {(i, j): None for i in range(n) for j in range(n)}
        for i, j in pairs:
            sign = -1 if (degrees[i] * degrees[j]) % 2 else 1
            if g.pairing(i, j) != sign * g.pairing(j, i):
                return False
        return True
