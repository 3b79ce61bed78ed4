"""
Brackets, Hamiltonian vector fields, BV Laplacians and master equations
for constant graded symplectic structures.

Sign table:
    {f, g} = sum (f right-derived by mu) w^{mu nu} (g left-derived by nu)
    deg {f, g} = deg f + deg g - n
    Q_Theta(g) = {Theta, g}
    Delta f = 1/2 sum (-1)^{|mu|} w^{mu nu} d_mu d_nu f
"""

import logging
from fractions import Fraction
from typing import Dict, Optional

from ...config import DEFAULT_SETTINGS
from ...errors import GradedAlgebraError, ValidationError
from ...models.derivation import Derivation
from ...models.poly import Poly
from ...models.report import Report
from ...models.symplectic import BVLaplacian, ConstantSymplectic

logger = logging.getLogger(__name__)


def residual_by_hbar(residual: Poly) -> Dict[str, Poly]:
    """Label the rational parts of a residual by hbar power and reality."""
    return {f"hbar^{k}{'*I' if im else ''}": part for (k, im), part in residual.scalar_parts().items()}


class BVOperations:
    """Static operations of the symplectic/BV layer."""

    @staticmethod
    def _check_system(omega: ConstantSymplectic, *polys: Poly) -> None:
        for poly in polys:
            if poly.system != omega.system:
                raise GradedAlgebraError("Coordinate system mismatch")

    @staticmethod
    def poisson_bracket(omega: ConstantSymplectic, f: Poly, g: Poly) -> Poly:
        """
        Poisson bracket of degree -n.

        Raises:
            GradedAlgebraError: On coordinate-system mismatch
        """
        BVOperations._check_system(omega, f, g)
        f_vars, g_vars = f.variables(), g.variables()
        right: Dict[str, Poly] = {}
        left: Dict[str, Poly] = {}
        result = Poly.zero(f.system, f.order).truncate(g.order)
        for mu, nu, value in omega.bivector_items():
            if mu not in f_vars or nu not in g_vars:
                continue
            if mu not in right:
                right[mu] = f.right_derive(mu)
            if nu not in left:
                left[nu] = g.derive(nu)
            result = result + right[mu] * left[nu] * value
        return result

    @staticmethod
    def hamiltonian_vf(omega: ConstantSymplectic, theta: Poly) -> Derivation:
        """
        Hamiltonian vector field Q with Q(g) = {theta, g}.

        Raises:
            GradedAlgebraError: If theta is not homogeneous
        """
        BVOperations._check_system(omega, theta)
        degree = theta.degree() - omega.degree
        variables = theta.variables()
        comps: Dict[str, Poly] = {}
        right: Dict[str, Poly] = {}
        for mu, nu, value in omega.bivector_items():
            if mu not in variables:
                continue
            if mu not in right:
                right[mu] = theta.right_derive(mu)
            term = right[mu] * value
            comps[nu] = comps[nu] + term if nu in comps else term
        return Derivation(omega.system, degree, comps)

    @staticmethod
    def hamiltonian_function(omega: ConstantSymplectic, field: Derivation,
                             check: bool = True) -> Optional[Poly]:
        """
        Recover a Hamiltonian H with hamiltonian_vf(omega, H) = field.

        Uses the Euler formula on the support coordinates; the constant term
        is fixed to zero.

        Returns:
            The Hamiltonian, or None when the field is not Hamiltonian (only
            detected when check is True)
        """
        system = omega.system
        support = omega.support
        support_idx = {system.index(n) for n in support}
        h_degree = field.degree + omega.degree
        h: Dict[str, Poly] = {}
        for mu in support:
            total = Poly.zero(system, field.order())
            for nu in support:
                coeff = omega.form_entry(nu, mu)
                if coeff:
                    total = total + field.component(nu) * coeff
            h[mu] = total

        def split_by_support_degree(poly: Poly) -> Dict[int, Poly]:
            parts: Dict[int, dict] = {}
            for key, value in poly.terms.items():
                k = sum(exp for idx, exp in key[0] if idx in support_idx)
                parts.setdefault(k, {})[key] = value
            return {k: Poly(system, terms, poly.order) for k, terms in parts.items()}

        result = Poly.zero(system, field.order())
        degrees = system.degrees
        for mu in support:
            sign = -1 if (degrees[system.index(mu)] * (h_degree + 1)) % 2 else 1
            y = Poly.coordinate(system, mu)
            for k, part in split_by_support_degree(h[mu]).items():
                result = result + y * part * Fraction(sign, k + 1)
        if check and BVOperations.hamiltonian_vf(omega, result) != field:
            logger.debug("Vector field of degree %d is not Hamiltonian", field.degree)
            return None
        return result

    @staticmethod
    def check_master_equation(omega: ConstantSymplectic, theta: Poly, name: str = "cme") -> Report:
        """
        Check {theta, theta} = 0.

        Raises:
            ValidationError: If theta is not of degree n + 1
        """
        if not theta.is_zero() and theta.degree() != omega.degree + 1:
            raise ValidationError(
                f"Master equation needs degree {omega.degree + 1}, got {theta.degree()}")
        residual = BVOperations.poisson_bracket(omega, theta, theta)
        logger.debug("Master equation residual has %d terms", len(residual))
        return Report.from_residual(name, residual, theta.order)

    @staticmethod
    def bv_laplacian(laplacian: BVLaplacian, f: Poly) -> Poly:
        """Apply the BV Laplacian."""
        return laplacian.apply(f)

    @staticmethod
    def leibniz_residual(laplacian: BVLaplacian, f: Poly, g: Poly) -> Poly:
        """
        Delta(fg) - Delta(f) g - (-1)^{|f|} f Delta(g) - (-1)^{|f|} {f, g},
        summed over the homogeneous parts of f.
        """
        omega = laplacian.omega
        residual = laplacian.apply(f * g)
        for degree, part in f.homogeneous_parts().items():
            sign = -1 if degree % 2 else 1
            residual = residual - laplacian.apply(part) * g
            residual = residual - (part * laplacian.apply(g)) * sign
            residual = residual - BVOperations.poisson_bracket(omega, part, g) * sign
        return residual

    @staticmethod
    def check_bv_leibniz(laplacian: BVLaplacian, f: Poly, g: Poly) -> Report:
        """Check the generalized Leibniz rule of the BV Laplacian."""
        return Report.from_residual("bv_leibniz", BVOperations.leibniz_residual(laplacian, f, g))

    @staticmethod
    def qme_residual(laplacian: BVLaplacian, action: Poly) -> Poly:
        """{S, S} - 2 i hbar Delta S."""
        system = action.system
        bracket = BVOperations.poisson_bracket(laplacian.omega, action, action)
        factor = Poly.hbar(system) * Poly.imaginary_unit(system) * 2
        return bracket - factor * laplacian.apply(action)

    @staticmethod
    def check_qme(laplacian: BVLaplacian, action: Poly, name: str = "qme") -> Report:
        """
        Check the quantum master equation; residuals are itemized per hbar power.

        Raises:
            ValidationError: If the action is not of degree 0
        """
        if not action.is_zero() and action.degree() != 0:
            raise ValidationError(f"Quantum master equation needs a degree 0 action, got {action.degree()}")
        residual = BVOperations.qme_residual(laplacian, action)
        return Report.from_residual(name, residual_by_hbar(residual), action.order,
                                    cap=DEFAULT_SETTINGS.residual_cap)
