"""
Hamiltonian Q-bundles: the classical bundle condition, the BF Wilson
surface bundle and Poisson sigma model vertical fields.

A trivial bundle E = M x N is Hamiltonian when

    Q_M(Theta_E) + 1/2 {Theta_E, Theta_E}_N = 0

and its vertical field is V = {Theta_E, -}_N.
"""

import logging
from fractions import Fraction
from typing import Dict, Mapping, Optional

from ...errors import ValidationError
from ...models.derivation import Derivation
from ...models.formal_exp_map import FormalExpMap
from ...models.graded_coordinate import BASE, CoordinateSystem, GradedCoordinate
from ...models.lie_structure import LieStructure
from ...models.poly import Poly
from ...models.qbundle_spec import QBundleSpec
from ...models.report import Report
from ...models.symplectic import ConstantSymplectic
from ...models.target_spec import TargetSpec
from ..aksz.formal_global import FormalGlobal
from ..aksz.targets import AKSZTargets
from ..bv.bv_operations import BVOperations

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class QBundles:
    """Static Q-bundle constructions and checks."""

    @staticmethod
    def base_field(spec: QBundleSpec) -> Derivation:
        """Q_M of the base target, acting on base x fiber."""
        base = spec.base
        return BVOperations.hamiltonian_vf(base.omega, base.theta).embed(spec.system)

    @staticmethod
    def vertical_field(spec: QBundleSpec) -> Derivation:
        """V = {Theta_E, -}_N."""
        return BVOperations.hamiltonian_vf(spec.total_fiber_omega, spec.theta_e)

    @staticmethod
    def qbundle_residual(spec: QBundleSpec) -> Poly:
        """Q_M(Theta_E) + 1/2 {Theta_E, Theta_E}_N."""
        theta_e = spec.theta_e
        bracket = BVOperations.poisson_bracket(spec.total_fiber_omega, theta_e, theta_e)
        return QBundles.base_field(spec).apply(theta_e) + bracket * HALF

    @staticmethod
    def check_hamiltonian_qbundle(spec: QBundleSpec) -> Report:
        """
        Check the bundle condition and, when the bundle quotes a closed-form
        vertical field, compare it with {Theta_E, -}_N generator by generator.
        """
        residuals: Dict[str, Poly] = {"classical": QBundles.qbundle_residual(spec)}
        if spec.quoted_field is not None:
            derived = QBundles.vertical_field(spec)
            for name in spec.fiber_names:
                residuals[f"V[{name}]"] = derived.component(name) - spec.quoted_field.component(name)
        report = Report.from_residual("qbundle", residuals)
        logger.debug("Q-bundle %s: %s", spec.name, report.status)
        return report

    # -------------------------------------------------------------- BF bundle

    @staticmethod
    def wilson_fiber(n: int, d: int) -> ConstantSymplectic:
        """g + g*[d - 3]: y1..yn of degree 0, ys1..ysn of degree d - 3, {ys_k, y_k} = 1."""
        system = CoordinateSystem([GradedCoordinate(f"y{k + 1}", 0, BASE) for k in range(n)]
                                  + [GradedCoordinate(f"ys{k + 1}", d - 3, BASE) for k in range(n)])
        return ConstantSymplectic.from_darboux_pairs(system, d - 3, [(f"ys{k + 1}", f"y{k + 1}") for k in range(n)])

    @staticmethod
    def quoted_wilson_field(g: LieStructure, d: int, system: CoordinateSystem) -> Derivation:
        """
        The closed form of the Wilson surface vertical field:

            V(y^k)  = f^k_ij x^i y^j
            V(ys_k) = (-1)^d ys_m f^m_ik x^i - xs_k

        i.e. [x, y] d/dy + (-1)^{d+1} (ad*_x ys + (-1)^d xs) d/dys, the sign
        (-1)^{d+1} being the orientation of the fiber pair {ys, y} = 1.
        """
        sign = -1 if d % 2 else 1
        comps: Dict[str, Poly] = {}

        def add(name: str, term: Poly) -> None:
            comps[name] = comps[name] + term if name in comps else term

        def c(name: str) -> Poly:
            return Poly.coordinate(system, name)

        for (k, i, j), value in g.items():
            add(f"y{k + 1}", c(f"x{i + 1}") * c(f"y{j + 1}") * value)
            add(f"ys{j + 1}", c(f"ys{k + 1}") * c(f"x{i + 1}") * (value * sign))
        for k in range(g.dimension):
            add(f"ys{k + 1}", -c(f"xs{k + 1}"))
        return Derivation(system, 1, comps)

    @staticmethod
    def build_bf_wilson_bundle(g: LieStructure, d: int) -> QBundleSpec:
        """
        The Wilson surface bundle over the BF target:

            Theta_E = (-1)^{d+1} ys_k f^k_ij x^i y^j + xs_i y^i

        on fiber g + g*[d - 3] (n = d - 3), with fiber split pairs (y_k, ys_k).
        Orientation is opposite to the quoted form <ys, [x, y]> + <xs, y>.

        Raises:
            ValidationError: If d < 1
        """
        base = AKSZTargets.build_bf_target(g, d)
        fiber = QBundles.wilson_fiber(g.dimension, d)
        system = base.system.union(fiber.system)
        sigma = 1 if d % 2 else -1

        def c(name: str) -> Poly:
            return Poly.coordinate(system, name)

        theta_e = Poly.zero(system)
        for (k, i, j), value in g.items():
            theta_e = theta_e + c(f"ys{k + 1}") * c(f"x{i + 1}") * c(f"y{j + 1}") * (value * sigma)
        for k in range(g.dimension):
            theta_e = theta_e + c(f"xs{k + 1}") * c(f"y{k + 1}")
        split = [(f"y{k + 1}", f"ys{k + 1}") for k in range(g.dimension)]
        quoted = QBundles.quoted_wilson_field(g, d, system)
        logger.debug("Wilson surface bundle for %s, d=%d: %d terms", g.name, d, len(theta_e))
        return QBundleSpec(f"wilson_{g.name}_d{d}", base, fiber, theta_e, split, quoted)

    # ------------------------------------------------------------ PSM bundle

    @staticmethod
    def psm_bundle(target: TargetSpec, fiber_omega: ConstantSymplectic,
                   vertical: Mapping[int, Poly], name: str = "psm_bundle") -> QBundleSpec:
        """
        Theta_E = p_i V^i for fiber Hamiltonians V^i(x, fiber).

        Args:
            vertical: Map base index (0-based) -> V^i over a system made of
                target and fiber coordinates

        Raises:
            ValidationError: On an index out of range or unknown coordinates
        """
        system = target.system.union(fiber_omega.system)
        theta_e = Poly.zero(system)
        for i, v in vertical.items():
            if not 0 <= i < len(target.base_names):
                raise ValidationError(f"Vertical field index {i} out of range")
            unknown = [n for n in v.variables() if n not in system]
            if unknown:
                raise ValidationError(f"Vertical field uses unknown coordinates {unknown}")
            if any(n in target.momentum_names for n in v.variables()):
                raise ValidationError("Vertical field components may not depend on momenta")
            momentum = Poly.coordinate(system, target.momentum_names[i])
            theta_e = theta_e + momentum * v.embed(system)
        return QBundleSpec(name, target, fiber_omega, theta_e)

    @staticmethod
    def check_psm_vertical_field(target: TargetSpec, fiber_omega: ConstantSymplectic,
                                 vertical: Mapping[int, Poly], phi: Optional[FormalExpMap] = None) -> Report:
        """
        1/2 {V, V}_N + [pi, V]_SN (+ R wedge V) = 0.

        The Schouten bracket is realized as {Theta, p_i V^i} on T*[1]M. With a
        formal exponential map the check runs in formal global coordinates,

            (-1)^d d_x Theta~_E + {Theta~ + R~, Theta~_E} + 1/2 {Theta~_E, Theta~_E}_N = 0,

        truncated at order N - 1 and itemized per dx-degree and fiber order.
        """
        spec = QBundles.psm_bundle(target, fiber_omega, vertical)
        if phi is None:
            return Report.from_residual("psm_vertical_field", {"classical": QBundles.qbundle_residual(spec)})
        level = FormalGlobal.background_system(target, extra=list(spec.fiber))
        theta_hat, r_term = FormalGlobal.lifted_functions(target, phi, level)
        theta_e = FormalGlobal.lift_function(target, phi, spec.theta_e, level)
        differentials = {x: f"d{x}" for x in target.base_names}
        d_x = FormalGlobal.background_differential(level, differentials)
        sign = -1 if target.dimension % 2 else 1
        base_omega = FormalGlobal.level_symplectic(target, level)
        fiber_omega_level = fiber_omega.embed(level)
        residual = (d_x.apply(theta_e) * sign
                    + BVOperations.poisson_bracket(base_omega, theta_hat + r_term, theta_e)
                    + BVOperations.poisson_bracket(fiber_omega_level, theta_e, theta_e) * HALF)
        residual = residual.truncate(phi.order - 1)
        report = Report.from_residual("psm_vertical_field", FormalGlobal.itemize(residual, differentials),
                                      phi.order - 1)
        report.add_note("formal global")
        return report
