"""
Transgression of AKSZ targets over finite source models.

Conventions (model basis e_a, integral I_a, P_ab = int e_a e_b, Q = P^-1):
    superfield       A^mu = sum_a e_a A^mu_a,  deg A^mu_a = |mu| - |a|
    field bivector   w_F^{(mu,b),(nu,e)} = (-1)^{|nu||b|} w^{mu nu} Q_eb
    lifted d         d^ A^mu_b = -(-1)^{|b|} sum_a D_a^b A^mu_a
    action           S = S_kin + int Theta(A), S_kin the Hamiltonian of d^

With these choices {int f(A), int g(A)} = int {f, g}(A), the field
structure has degree n - d = -1 and (1 tensor Q_S) A = -dA + (-1)^d Q_M(A).
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ...errors import ValidationError
from ...models.derivation import Derivation
from ...models.finite_bv_theory import FiniteBVTheory
from ...models.graded_coordinate import BASE, FIBER, CoordinateSystem, GradedCoordinate
from ...models.poly import Poly
from ...models.report import Report
from ...models.source_model import SourceModel
from ...models.symplectic import ConstantSymplectic
from ...models.target_spec import TargetSpec
from ..bv.bv_operations import BVOperations
from ..graded.graded_algebra import GradedAlgebra
from .model_valued import ModelValued

logger = logging.getLogger(__name__)

ComponentMap = Dict[Tuple[str, int], str]


class Transgression:
    """Static transgression machinery."""

    @staticmethod
    def component_name(coordinate: str, label: str) -> str:
        return f"{coordinate}_{label}"

    @staticmethod
    def field_coordinates(target_system: CoordinateSystem, model: SourceModel,
                          coordinates: Optional[Sequence[str]] = None,
                          fiber: Iterable[str] = (), rename: Optional[Mapping[str, str]] = None
                          ) -> Tuple[List[GradedCoordinate], ComponentMap]:
        """
        Component coordinates for target coordinates over a model.

        Args:
            coordinates: Target coordinates to expand (default: all)
            fiber: Target coordinates whose components count towards truncation
            rename: Optional target coordinate -> prefix used in field names
        """
        coordinates = list(coordinates) if coordinates is not None else target_system.names
        fiber = set(fiber)
        coords: List[GradedCoordinate] = []
        comps: ComponentMap = {}
        for mu in coordinates:
            degree = target_system[mu].degree
            prefix = (rename or {}).get(mu, mu)
            for a, label in enumerate(model.labels):
                name = Transgression.component_name(prefix, label)
                coords.append(GradedCoordinate(name, degree - model.degrees[a], FIBER if mu in fiber else BASE))
                comps[(mu, a)] = name
        return coords, comps

    @staticmethod
    def superfields(system: CoordinateSystem, model: SourceModel, comps: ComponentMap,
                    order: Optional[int] = None) -> Dict[str, ModelValued]:
        """The superfield of every expanded target coordinate."""
        grouped: Dict[str, Dict[int, str]] = {}
        for (mu, a), name in comps.items():
            grouped.setdefault(mu, {})[a] = name
        return {mu: ModelValued.superfield(model, system, fields, order) for mu, fields in grouped.items()}

    @staticmethod
    def field_bivector(omega: ConstantSymplectic, model: SourceModel, comps: ComponentMap,
                       shift: int = 0) -> Dict[Tuple[str, str], Fraction]:
        """
        Bivector of the transgressed symplectic structure.

        Args:
            shift: Extra sign exponent (-1)^{shift} applied to every entry
        """
        inverse = model.inverse_pairing()
        degrees = model.degrees
        target = omega.system
        entries: Dict[Tuple[str, str], Fraction] = {}
        sign_shift = -1 if shift % 2 else 1
        for mu, nu, value in omega.bivector_items():
            nu_degree = target[nu].degree
            for b in range(len(model)):
                if (mu, b) not in comps:
                    continue
                for e in range(len(model)):
                    q = inverse[e][b]
                    if not q or (nu, e) not in comps:
                        continue
                    sign = -1 if (nu_degree * degrees[b]) % 2 else 1
                    entries[(comps[(mu, b)], comps[(nu, e)])] = value * q * sign * sign_shift
        return entries

    @staticmethod
    def lifted_differential(system: CoordinateSystem, model: SourceModel, comps: ComponentMap) -> Derivation:
        """The derivation d^ induced by the model differential on component fields."""
        degrees = model.degrees
        parts: Dict[str, Poly] = {}
        for (mu, a), name in comps.items():
            for b, coeff in model.differential_of(a).items():
                target_name = comps.get((mu, b))
                if target_name is None:
                    continue
                sign = 1 if degrees[b] % 2 else -1
                term = Poly.coordinate(system, name) * (coeff * sign)
                parts[target_name] = parts[target_name] + term if target_name in parts else term
        return Derivation(system, 1, parts)

    @staticmethod
    def kinetic_action(omega_f: ConstantSymplectic, lifted: Derivation) -> Poly:
        """
        The Hamiltonian of the lifted differential.

        Raises:
            ValidationError: If the lifted differential is not Hamiltonian
        """
        if lifted.is_zero():
            return Poly.zero(omega_f.system)
        action = BVOperations.hamiltonian_function(omega_f, lifted)
        if action is None:
            raise ValidationError("Lifted model differential is not Hamiltonian")
        return action

    @staticmethod
    def transgress_function(theta: Poly, superfields: Mapping[str, ModelValued], model: SourceModel,
                            system: CoordinateSystem, constants: Optional[Mapping[str, Poly]] = None) -> Poly:
        """int theta(A) over the model."""
        return ModelValued.evaluate(theta, superfields, model, system, constants).integrate()

    @staticmethod
    def transgress(target: TargetSpec, model: SourceModel, name: Optional[str] = None) -> FiniteBVTheory:
        """
        Transgress a target over a source model.

        Raises:
            ValidationError: If the model dimension differs from the target's
                source dimension or the Poincare pairing is degenerate
        """
        if model.dimension != target.dimension:
            raise ValidationError(
                f"Model dimension {model.dimension} does not match target dimension {target.dimension}")
        coords, comps = Transgression.field_coordinates(target.system, model)
        system = CoordinateSystem(coords)
        omega_f = ConstantSymplectic(system, -1, Transgression.field_bivector(target.omega, model, comps))
        lifted = Transgression.lifted_differential(system, model, comps)
        kinetic = Transgression.kinetic_action(omega_f, lifted)
        fields = Transgression.superfields(system, model, comps)
        interaction = Transgression.transgress_function(target.theta, fields, model, system)
        action = kinetic + interaction
        report = BVOperations.check_master_equation(omega_f, action)
        logger.info("Transgressed %s over %s: %d fields, CME %s",
                    target.name, model.name, len(coords), report.status)
        return FiniteBVTheory(name or f"{target.name}@{model.name}", omega_f, action,
                              BVOperations.hamiltonian_vf(omega_f, action), comps, [report])

    @staticmethod
    def check_reparametrization(theory: FiniteBVTheory, model: SourceModel,
                                automorphism: Mapping[int, Mapping[int, object]]) -> Report:
        """
        Pull the theory back along a model automorphism e_a -> sum_b g_a^b e_b.

        Checks that the induced linear field map A_b -> sum_a g_a^b A_a
        preserves both the action and the symplectic structure.

        Raises:
            ValidationError: If the map is not an integral-preserving cdga automorphism
        """
        if not model.is_automorphism(automorphism):
            raise ValidationError("Map is not an integral-preserving automorphism of the model")
        system = theory.system
        comps = theory.components
        images: Dict[str, Poly] = {}
        for (mu, b), name in comps.items():
            image = Poly.zero(system)
            for a in range(len(model)):
                coeff = Fraction(automorphism.get(a, {a: 1}).get(b, 0))
                if coeff and (mu, a) in comps:
                    image = image + Poly.coordinate(system, comps[(mu, a)]) * coeff
            images[name] = image
        pulled = GradedAlgebra.substitute(theory.action, images, target=system)
        residuals: Dict[str, Poly] = {"action": pulled - theory.action}
        residuals.update(Transgression.bracket_residuals(theory.omega, images, theory.field_names))
        return Report.from_residual("reparametrization", residuals)

    @staticmethod
    def bracket_residuals(omega: ConstantSymplectic, images: Mapping[str, Poly],
                          names: Sequence[str]) -> Dict[str, Poly]:
        """{F(u), F(v)} - w^{uv} for every unordered pair, labelled omega(u,v); zero pairs are left out."""
        system = omega.system
        residuals: Dict[str, Poly] = {}
        for i, u in enumerate(names):
            for v in names[i:]:
                lhs = BVOperations.poisson_bracket(omega, images[u], images[v])
                residual = lhs - Poly.constant(system, omega.entry(u, v))
                if not residual.is_zero():
                    residuals[f"omega({u},{v})"] = residual
        return residuals
