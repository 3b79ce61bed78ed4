"""
Formal global split actions and the differential classical master equation.

For a split target with base coordinates X^i (degree 0) and momenta P_i
(degree d - 1), a formal exponential map phi_x replaces (X, P) by
fluctuations (a, b) around a background point x:

    X^i = phi_x^i(a),    P_i = b_j (J^-1)^j_i

and the R-term  (-1)^d s_j R_l^j(x, a) dx^l b_j  is added, where
s_j = {P_j, X^j} is the orientation of the j-th Darboux pair. The background
x and its differentials dx are spectator coordinates; d_x sends x^l to dx^l.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from ...errors import ValidationError
from ...models.derivation import Derivation
from ...models.finite_bv_theory import FiniteBVTheory
from ...models.formal_exp_map import FormalExpMap
from ...models.graded_coordinate import BASE, FIBER, CoordinateSystem, GradedCoordinate
from ...models.poly import Poly
from ...models.report import Report
from ...models.source_model import SourceModel
from ...models.symplectic import ConstantSymplectic
from ...models.target_spec import TargetSpec
from ..bv.bv_operations import BVOperations
from ..formal.formal_geometry import FormalGeometry
from ..graded.graded_algebra import GradedAlgebra
from .transgression import Transgression

logger = logging.getLogger(__name__)


def fluctuation_name(name: str) -> str:
    """Name of the fluctuation coordinate of a target coordinate."""
    return f"{name}h"


@dataclass(frozen=True)
class FormalGlobalAction:
    """
    A formal global action split as kinetic + Theta-hat + R-term.

    The theory carries the full action; the parts are kept for obstruction
    and zeroed-R diagnostics.
    """

    theory: FiniteBVTheory
    kinetic: Poly
    interaction: Poly
    r_term: Poly
    differentials: Dict[str, str]
    order: int
    dimension: int

    @property
    def action(self) -> Poly:
        return self.theory.action

    @property
    def aksz_action(self) -> Poly:
        """The action without the R-term."""
        return self.kinetic + self.interaction

    @property
    def omega(self) -> ConstantSymplectic:
        return self.theory.omega


class FormalGlobal:
    """Static constructions of formal global split actions."""

    @staticmethod
    def background_system(target: TargetSpec, extra=()) -> CoordinateSystem:
        """
        Target-level system: background x, differentials dx, fluctuations a, b.

        Args:
            extra: Further coordinates appended at the end
        """
        d = target.dimension
        coords = [GradedCoordinate(x, 0, BASE) for x in target.base_names]
        coords += [GradedCoordinate(f"d{x}", 1, BASE) for x in target.base_names]
        coords += [GradedCoordinate(fluctuation_name(x), 0, FIBER) for x in target.base_names]
        coords += [GradedCoordinate(fluctuation_name(p), d - 1, BASE) for p in target.momentum_names]
        return CoordinateSystem(coords + list(extra))

    @staticmethod
    def _check_inputs(target: TargetSpec, phi: FormalExpMap) -> None:
        if not target.is_split:
            raise ValidationError(f"Target '{target.name}' is not split into base and momentum pairs")
        if phi.base_names != target.base_names:
            raise ValidationError(
                f"Exponential map base {phi.base_names} differs from target base {target.base_names}")
        if phi.parameters:
            raise ValidationError("Formal global actions need an exponential map without parameters")

    @staticmethod
    def _lift_map(phi: FormalExpMap, level: CoordinateSystem):
        rename = {p: fluctuation_name(x) for p, x in zip(phi.fiber_names, phi.base_names)}

        def lift(poly: Poly) -> Poly:
            return poly.rename(rename, level).with_order(phi.order)

        return lift

    @staticmethod
    def lifted_assignment(target: TargetSpec, phi: FormalExpMap, level: CoordinateSystem) -> Dict[str, Poly]:
        """X^i -> phi^i(a) and P_i -> sum_j b_j (J^-1)^j_i on the target-level system."""
        lift = FormalGlobal._lift_map(phi, level)
        inverse = FormalGeometry.invert_fiber_jacobian(phi)
        bases, momenta = target.base_names, target.momentum_names
        b = [Poly.coordinate(level, fluctuation_name(p)) for p in momenta]
        components = phi.components()
        assignment: Dict[str, Poly] = {}
        for i, x in enumerate(bases):
            assignment[x] = lift(components[i])
        for i, p in enumerate(momenta):
            image = Poly.zero(level, phi.order)
            for j in range(len(momenta)):
                image = image + b[j] * lift(inverse[j][i])
            assignment[p] = image
        return assignment

    @staticmethod
    def lift_function(target: TargetSpec, phi: FormalExpMap, f: Poly, level: CoordinateSystem) -> Poly:
        """
        A function of the target (and of further coordinates declared on the
        level system) in formal global coordinates.

        Raises:
            ValidationError: If the target is not split or phi does not live
                on its base coordinates
        """
        FormalGlobal._check_inputs(target, phi)
        assignment = FormalGlobal.lifted_assignment(target, phi, level)
        return GradedAlgebra.substitute(f, assignment, phi.order, target=level)

    @staticmethod
    def lifted_functions(target: TargetSpec, phi: FormalExpMap,
                         level: Optional[CoordinateSystem] = None) -> Tuple[Poly, Poly]:
        """
        Theta-hat and the R-term as functions on the target-level system.

        Returns:
            (theta_hat, r_term), both truncated at the map's order

        Raises:
            ValidationError: If the target is not split or phi does not live
                on its base coordinates
        """
        level = level or FormalGlobal.background_system(target)
        theta_hat = FormalGlobal.lift_function(target, phi, target.theta, level)
        lift = FormalGlobal._lift_map(phi, level)
        R = FormalGeometry.compute_R(phi)
        sign = -1 if target.dimension % 2 else 1
        bases = target.base_names
        r_term = Poly.zero(level, phi.order)
        for j, (x, p) in enumerate(target.split_pairs):
            orientation = target.omega.entry(p, x) * sign
            b_j = Poly.coordinate(level, fluctuation_name(p))
            for ell, base in enumerate(bases):
                entry = lift(R.matrix_entry(ell, j))
                r_term = r_term + entry * Poly.coordinate(level, f"d{base}") * b_j * orientation
        return theta_hat, r_term

    @staticmethod
    def level_symplectic(target: TargetSpec, level: CoordinateSystem) -> ConstantSymplectic:
        """The target structure copied onto the fluctuations (a, b)."""
        names = {n: fluctuation_name(n) for n in target.system.names}
        bivector = {(names[mu], names[nu]): v for mu, nu, v in target.omega.bivector_items()}
        return ConstantSymplectic(level, target.omega.degree, bivector)

    @staticmethod
    def formal_global_action(target: TargetSpec, model: SourceModel, phi: FormalExpMap,
                             order: Optional[int] = None, name: Optional[str] = None) -> FormalGlobalAction:
        """
        Transgress the formal global target data over a source model.

        Args:
            order: Truncation order (defaults to the map's order; it may not
                exceed it)

        Raises:
            ValidationError: On non-split targets, mismatched dimensions or maps
        """
        if model.dimension != target.dimension:
            raise ValidationError(
                f"Model dimension {model.dimension} does not match target dimension {target.dimension}")
        if order is not None and order != phi.order:
            if order > phi.order:
                raise ValidationError(f"Order {order} exceeds the exponential map order {phi.order}")
            coefficients = {k: v for k, v in phi.coefficients.items() if len(k[1]) <= order}
            phi = FormalExpMap(phi.base_names, order, coefficients, phi.fiber_names)
        level = FormalGlobal.background_system(target)
        theta_hat, r_term = FormalGlobal.lifted_functions(target, phi, level)
        level_omega = FormalGlobal.level_symplectic(target, level)

        fluctuations = [fluctuation_name(n) for n in target.system.names]
        fibers = [fluctuation_name(x) for x in target.base_names]
        coords, comps = Transgression.field_coordinates(level, model, fluctuations, fiber=fibers)
        spectators = [level[x] for x in target.base_names] + [level[f"d{x}"] for x in target.base_names]
        system = CoordinateSystem(coords + spectators)
        omega_f = ConstantSymplectic(system, -1, Transgression.field_bivector(level_omega, model, comps))
        kinetic = Transgression.kinetic_action(omega_f, Transgression.lifted_differential(system, model, comps))
        fields = Transgression.superfields(system, model, comps, phi.order)
        constants = {c.name: Poly.coordinate(system, c.name) for c in spectators}
        interaction = Transgression.transgress_function(theta_hat, fields, model, system, constants)
        r_action = Transgression.transgress_function(r_term, fields, model, system, constants)
        action = kinetic + interaction + r_action
        differentials = {x: f"d{x}" for x in target.base_names}
        theory = FiniteBVTheory(name or f"{target.name}@{model.name}/global", omega_f, action,
                                components=comps)
        logger.info("Formal global action for %s over %s: %d terms at order %d",
                    target.name, model.name, len(action), phi.order)
        return FormalGlobalAction(theory, kinetic, interaction, r_action, differentials, phi.order,
                                  target.dimension)

    @staticmethod
    def background_differential(system: CoordinateSystem, differentials: Mapping[str, str]) -> Derivation:
        """d_x as the derivation x^l -> dx^l."""
        return Derivation(system, 1, {x: Poly.coordinate(system, dx) for x, dx in differentials.items()})

    @staticmethod
    def dcme_residual(action: Poly, omega: ConstantSymplectic, differentials: Mapping[str, str],
                      order: int) -> Poly:
        """d_x S + 1/2 {S, S}, truncated at order - 1."""
        d_x = FormalGlobal.background_differential(action.system, differentials)
        bracket = BVOperations.poisson_bracket(omega, action, action)
        return (d_x.apply(action) + bracket * Fraction(1, 2)).truncate(order - 1)

    @staticmethod
    def split_by_form_degree(poly: Poly, differentials: Mapping[str, str]) -> Dict[int, Poly]:
        """Split a polynomial by its degree in the background differentials."""
        system = poly.system
        dx_idx = {system.index(dx) for dx in differentials.values()}
        parts: Dict[int, dict] = {}
        for key, value in poly.terms.items():
            r = sum(e for i, e in key[0] if i in dx_idx)
            parts.setdefault(r, {})[key] = value
        return {r: Poly(system, terms, poly.order) for r, terms in sorted(parts.items())}

    @staticmethod
    def itemize(residual: Poly, differentials: Mapping[str, str], symbol: str = "dx") -> Dict[str, Poly]:
        """Residual pieces labelled by background form degree and fiber order."""
        items: Dict[str, Poly] = {}
        for r, part in FormalGlobal.split_by_form_degree(residual, differentials).items():
            for w in range(part.max_weight() + 1):
                piece = part.weight_part(w)
                if not piece.is_zero():
                    items[f"{symbol}^{r} order {w}"] = piece
        return items

    @staticmethod
    def check_dcme(action: Poly, omega: ConstantSymplectic, differentials: Mapping[str, str],
                   order: int, name: str = "dcme") -> Report:
        """
        Check d_x S + 1/2 {S, S} = 0 up to fiber order N - 1.

        Residuals are itemized per dx-degree (0 and 1 for the split action;
        2 only when the R-term is not flat) and per fiber order.
        """
        residual = FormalGlobal.dcme_residual(action, omega, differentials, order)
        items = FormalGlobal.itemize(residual, differentials)
        logger.debug("dCME residual: %d pieces", len(items))
        return Report.from_residual(name, items, order - 1)

    @staticmethod
    def check_global(data: FormalGlobalAction, include_r: bool = True) -> Report:
        """check_dcme on a formal global action, optionally without its R-term."""
        action = data.action if include_r else data.aksz_action
        report = FormalGlobal.check_dcme(action, data.omega, data.differentials, data.order)
        if not include_r:
            report.add_note("R-term removed")
        return report
