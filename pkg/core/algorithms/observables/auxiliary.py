"""
Auxiliary theories on embedded submanifolds, pre-observables and the
obstruction for their formal global extension.

For a bundle E = M x N, an ambient theory over a d-dimensional model and
an embedding model i of dimension k, the auxiliary fields are the
components of the fiber coordinates over the submanifold model and

    S^aux = S_kin + (-1)^{d-k} int_k Theta_E(i*A, Y)
    w^aux = transgression of w_N (degree n - k)

With this normalization

    Q(S^aux) + 1/2 {S^aux, S^aux}_aux = int_k (Q_M Theta_E + 1/2 {Theta_E, Theta_E}_N)(i*A, Y),

so every Hamiltonian Q-bundle gives a pre-observable.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from ...errors import ValidationError
from ...models.derivation import Derivation
from ...models.embedding_model import EmbeddingModel
from ...models.finite_bv_theory import FiniteBVTheory
from ...models.formal_exp_map import FormalExpMap
from ...models.graded_coordinate import CoordinateSystem, GradedCoordinate
from ...models.poly import Poly
from ...models.qbundle_spec import QBundleSpec
from ...models.report import Report
from ...models.symplectic import ConstantSymplectic
from ...models.target_spec import TargetSpec
from ..aksz.formal_global import FormalGlobal, fluctuation_name
from ..aksz.model_valued import ModelValued
from ..aksz.transgression import Transgression
from ..bv.bv_operations import BVOperations

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AuxiliaryParts:
    """Field system and action pieces of an auxiliary theory."""

    system: CoordinateSystem
    omega: ConstantSymplectic
    kinetic: Poly
    superfields: Dict[str, ModelValued]
    components: Dict[Tuple[str, int], str]
    sign: int


@dataclass(frozen=True)
class FormalGlobalAuxiliary:
    """
    A formal global auxiliary theory with background y on the fiber.

    The R-term is stored in the ordering int R beta dy, opposite to the one
    making the fiber-level dCME hold.
    """

    theory: FiniteBVTheory
    aksz_action: Poly
    r_term: Poly
    ambient_field: Derivation
    differentials: Dict[str, str]
    order: int
    dimension: int


class PreObservables:
    """Static auxiliary-theory constructions and checks."""

    @staticmethod
    def restricted_superfields(ambient: FiniteBVTheory, emb: EmbeddingModel,
                               system: CoordinateSystem) -> Dict[str, ModelValued]:
        """
        i*A^mu = sum_b e'_b (sum_a r_a^b A^mu_a) on the submanifold model.

        Raises:
            ValidationError: If the ambient theory has no component map or its
                fields do not match the ambient model
        """
        comps = ambient.components
        if not comps:
            raise ValidationError(f"Theory '{ambient.name}' has no component fields to restrict")
        amb, sub = emb.ambient, emb.submanifold
        grouped: Dict[str, Dict[int, Poly]] = {}
        for (mu, a), name in comps.items():
            if a >= len(amb) or name != Transgression.component_name(mu, amb.labels[a]):
                raise ValidationError(f"Field '{name}' does not match the ambient model {amb.name}")
            parts = grouped.setdefault(mu, {})
            for b, coeff in emb.image(a).items():
                term = Poly.coordinate(system, name) * coeff
                parts[b] = parts[b] + term if b in parts else term
        return {mu: ModelValued(sub, system, parts) for mu, parts in grouped.items()}

    @staticmethod
    def auxiliary_parts(fiber_omega: ConstantSymplectic, expand: Sequence[str], ambient: FiniteBVTheory,
                        emb: EmbeddingModel, fiber_kind: Iterable[str] = (),
                        spectators: Sequence[GradedCoordinate] = (),
                        order: Optional[int] = None) -> AuxiliaryParts:
        """
        Auxiliary fields, structure and kinetic term over the submanifold model.

        Args:
            fiber_omega: Fiber structure over a system declaring the expanded coordinates
            expand: Fiber coordinates to expand into component fields
            fiber_kind: Expanded coordinates whose components count towards truncation
            spectators: Extra coordinates appended to the field system

        Raises:
            ValidationError: If the ambient theory does not match the embedding
                or the lifted differential is not Hamiltonian
        """
        sub = emb.submanifold
        coords, comps = Transgression.field_coordinates(fiber_omega.system, sub, expand, fiber=fiber_kind)
        taken = [c.name for c in coords if c.name in ambient.system]
        if taken:
            raise ValidationError(f"Auxiliary fields {taken} clash with ambient fields")
        system = ambient.system.extend(coords).union(CoordinateSystem(spectators))
        k = sub.dimension
        omega = ConstantSymplectic(system, fiber_omega.degree - k,
                                   Transgression.field_bivector(fiber_omega, sub, comps))
        kinetic = Transgression.kinetic_action(omega, Transgression.lifted_differential(system, sub, comps))
        fields = PreObservables.restricted_superfields(ambient, emb, system)
        fields.update(Transgression.superfields(system, sub, comps, order))
        sign = -1 if emb.codimension % 2 else 1
        return AuxiliaryParts(system, omega, kinetic, fields, comps, sign)

    @staticmethod
    def _check_degree(spec: QBundleSpec, emb: EmbeddingModel) -> None:
        k = emb.submanifold.dimension
        if spec.degree != k - 1:
            logger.warning("Fiber degree %d differs from k - 1 = %d; auxiliary theory is not of BV degree",
                           spec.degree, k - 1)

    @staticmethod
    def transgress_auxiliary(spec: QBundleSpec, ambient: FiniteBVTheory, emb: EmbeddingModel,
                             name: Optional[str] = None) -> FiniteBVTheory:
        """
        The auxiliary theory of a bundle over an embedded submanifold model.

        Fields: components of the fiber coordinates over the submanifold
        model; ambient fields enter through i* and act as spectators.

        Raises:
            ValidationError: If the ambient theory does not match the embedding
        """
        PreObservables._check_degree(spec, emb)
        parts = PreObservables.auxiliary_parts(spec.fiber_omega, spec.fiber_names, ambient, emb)
        interaction = Transgression.transgress_function(spec.theta_e, parts.superfields, emb.submanifold,
                                                        parts.system) * parts.sign
        action = parts.kinetic + interaction
        logger.info("Auxiliary theory of %s over %s: %d fields, %d terms",
                    spec.name, emb.submanifold.name, len(parts.components), len(action))
        return FiniteBVTheory(name or f"{spec.name}@{emb.submanifold.name}", parts.omega, action,
                              components=parts.components, degree=parts.omega.degree)

    @staticmethod
    def ambient_field(ambient: FiniteBVTheory, system: CoordinateSystem) -> Derivation:
        """The ambient cohomological vector field over an auxiliary system."""
        field = ambient.vector_field
        if field is None:
            field = BVOperations.hamiltonian_vf(ambient.omega, ambient.action)
        return field.embed(system)

    @staticmethod
    def pre_observable_residual(field: Derivation, omega: ConstantSymplectic, action: Poly) -> Poly:
        """Q(S^aux) + 1/2 {S^aux, S^aux}_aux."""
        return field.apply(action) + BVOperations.poisson_bracket(omega, action, action) * HALF

    @staticmethod
    def check_pre_observable(ambient: FiniteBVTheory, aux: FiniteBVTheory) -> Report:
        """
        Check Q(S^aux) + 1/2 {S^aux, S^aux}_aux = 0.

        Raises:
            ValidationError: If the auxiliary system does not contain the ambient fields
        """
        missing = [n for n in ambient.field_names if n not in aux.system]
        if missing:
            raise ValidationError(f"Auxiliary theory lacks ambient fields {missing[:3]}")
        field = PreObservables.ambient_field(ambient, aux.system)
        residual = PreObservables.pre_observable_residual(field, aux.omega, aux.action)
        report = Report.from_residual("pre_observable", residual, aux.action.order)
        logger.debug("Pre-observable %s: %s (%d residual terms)", aux.name, report.status, len(residual))
        return report

    # ----------------------------------------------------------- formal global

    @staticmethod
    def fiber_target(spec: QBundleSpec, k: int) -> TargetSpec:
        """
        The fiber viewed as a split target over base x fiber, so that the
        formal global machinery lifts Theta_E in the fiber directions.

        Raises:
            ValidationError: If the bundle has no fiber split or n != k - 1
        """
        if not spec.is_split:
            raise ValidationError(f"Bundle '{spec.name}' has no fiber split")
        if spec.degree != k - 1:
            raise ValidationError(f"Formal global auxiliary theories need n = k - 1, got n = {spec.degree}")
        return TargetSpec(f"{spec.name}/fiber", k, spec.total_fiber_omega, spec.theta_e, spec.fiber_split)

    @staticmethod
    def formal_global_auxiliary(spec: QBundleSpec, ambient: FiniteBVTheory, emb: EmbeddingModel,
                                phi: FormalExpMap) -> FormalGlobalAuxiliary:
        """
        The auxiliary theory with a formal exponential map on the fiber base.

        Background points y and differentials dy are spectators; the action is
        S^AKSZ + S_R with S_R = int R beta dy.

        Raises:
            ValidationError: On non-split bundles or maps not living on the fiber base
        """
        k = emb.submanifold.dimension
        target = PreObservables.fiber_target(spec, k)
        level = FormalGlobal.background_system(target, extra=list(spec.base.system))
        theta_hat, r_term = FormalGlobal.lifted_functions(target, phi, level)
        level_omega = FormalGlobal.level_symplectic(target, level)
        bases = target.base_names
        spectators = [level[y] for y in bases] + [level[f"d{y}"] for y in bases]
        expand = [fluctuation_name(n) for n in spec.fiber_names]
        parts = PreObservables.auxiliary_parts(level_omega, expand, ambient, emb,
                                               fiber_kind=[fluctuation_name(y) for y in bases],
                                               spectators=spectators, order=phi.order)
        constants = {c.name: Poly.coordinate(parts.system, c.name) for c in spectators}
        sub = emb.submanifold
        interaction = Transgression.transgress_function(theta_hat, parts.superfields, sub, parts.system,
                                                        constants) * parts.sign
        r_action = -Transgression.transgress_function(r_term, parts.superfields, sub, parts.system, constants)
        aksz_action = parts.kinetic + interaction
        theory = FiniteBVTheory(f"{spec.name}@{sub.name}/global", parts.omega, aksz_action + r_action,
                                components=parts.components, degree=parts.omega.degree)
        logger.info("Formal global auxiliary theory of %s over %s: %d terms at order %d",
                    spec.name, sub.name, len(theory.action), phi.order)
        return FormalGlobalAuxiliary(theory, aksz_action, r_action,
                                     PreObservables.ambient_field(ambient, parts.system),
                                     {y: f"d{y}" for y in bases}, phi.order, emb.ambient.dimension)

    @staticmethod
    def obstruction_residuals(data: FormalGlobalAuxiliary) -> Dict[str, Poly]:
        """
        The obstruction in three forms, truncated at order N - 1:

            direct:       Q(S) + 1/2 {S, S}
            obstruction_1: d_y S^AKSZ + 1/2 {S_R, S_R}
            obstruction_2: V(S_R) + d_y S_R,  V = {S^AKSZ, -}
        """
        omega = data.theory.omega
        d_y = FormalGlobal.background_differential(data.theory.system, data.differentials)
        aksz, r = data.aksz_action, data.r_term
        cut = data.order - 1
        direct = PreObservables.pre_observable_residual(data.ambient_field, omega, data.theory.action)
        first = d_y.apply(aksz) + BVOperations.poisson_bracket(omega, r, r) * HALF
        second = BVOperations.poisson_bracket(omega, aksz, r) + d_y.apply(r)
        return {"direct": direct.truncate(cut), "obstruction_1": first.truncate(cut),
                "obstruction_2": second.truncate(cut)}

    @staticmethod
    def check_global_obstruction(data: FormalGlobalAuxiliary) -> Report:
        """
        Evaluate the obstruction per dy-degree and fiber order; the other two
        forms must agree with it.
        """
        residuals = PreObservables.obstruction_residuals(data)
        first = residuals["obstruction_1"]
        consistent = ((first - residuals["obstruction_2"]).is_zero()
                      and (first - residuals["direct"]).is_zero())
        items = FormalGlobal.itemize(first, data.differentials, symbol="dy")
        report = Report.from_residual("obstruction", items, data.order - 1, details={'consistent': consistent})
        if consistent:
            return report
        logger.warning("Obstruction forms disagree for %s", data.theory.name)
        mismatch = Report.from_residual("obstruction_consistency", {
            "obstruction_2": residuals["obstruction_2"] - first,
            "direct": residuals["direct"] - first,
        })
        return Report.combine("obstruction", [report, mismatch])
