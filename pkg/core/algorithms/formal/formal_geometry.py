"""
Formal geometry of exponential maps.

Conventions:
    J^k_j = d phi^k / d p^j
    R_l^j = - (d phi^k / d x^l) (J^-1)^j_k,  so R_l^j(x, 0) = -delta_l^j
    D = d_x + R acts on sections; a 1-form residual is returned as
    sum_l dx^l (...) over the exponential map's form system.

Every identity is exact up to fiber order N - 1 for a map truncated at N.
"""

import logging
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...errors import ValidationError
from ...models.connection_one_form import ConnectionOneForm, FormalVolume
from ...models.derivation import Derivation
from ...models.formal_exp_map import FormalExpMap
from ...models.poly import Poly
from ...models.report import Report
from ..graded.graded_algebra import GradedAlgebra

logger = logging.getLogger(__name__)

Matrix = List[List[Poly]]


def matrix_multiply(a: Matrix, b: Matrix) -> Matrix:
    """Product of two square matrices of polynomials."""
    n = len(a)
    result = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = a[i][0] * b[0][j]
            for k in range(1, n):
                entry = entry + a[i][k] * b[k][j]
            row.append(entry)
        result.append(row)
    return result


def permutation_sign(perm: Tuple[int, ...]) -> int:
    """Sign of a permutation given as a tuple."""
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def partial_derivation(field: Derivation, name: str) -> Derivation:
    """Differentiate every component of a derivation by a coordinate."""
    return Derivation(field.system, field.degree,
                      {c: poly.derive(name) for c, poly in field.components.items()}, check_degrees=False)


class FormalGeometry:
    """Static operations on formal exponential maps and their connection."""

    @staticmethod
    def invert_fiber_jacobian(phi: FormalExpMap) -> Matrix:
        """
        Power-series inverse of the fiber Jacobian.

        J = 1 + E with E = O(p), so J^-1 = sum_n (-E)^n up to n = N.
        """
        jac = phi.fiber_jacobian()
        m = phi.dimension
        system, order = phi.system, phi.order
        identity = [[Poly.constant(system, 1 if i == j else 0, order) for j in range(m)] for i in range(m)]
        minus_e = [[identity[i][j] - jac[i][j] for j in range(m)] for i in range(m)]
        inverse = [row[:] for row in identity]
        term = identity
        for _ in range(order):
            term = matrix_multiply(term, minus_e)
            if all(entry.is_zero() for row in term for entry in row):
                break
            inverse = [[inverse[i][j] + term[i][j] for j in range(m)] for i in range(m)]
        return inverse

    @staticmethod
    def jacobian_residual(phi: FormalExpMap, inverse: Optional[Matrix] = None) -> Matrix:
        """J^-1 J - 1, zero up to the truncation order."""
        inverse = inverse or FormalGeometry.invert_fiber_jacobian(phi)
        product = matrix_multiply(inverse, phi.fiber_jacobian())
        m = phi.dimension
        return [[product[i][j] - (1 if i == j else 0) for j in range(m)] for i in range(m)]

    @staticmethod
    def compute_R(phi: FormalExpMap) -> ConnectionOneForm:
        """The connection 1-form of the exponential map."""
        inverse = FormalGeometry.invert_fiber_jacobian(phi)
        comps = phi.components()
        m = phi.dimension
        fields = []
        for ell, x in enumerate(phi.base_names):
            dphi = [c.derive(x) for c in comps]
            entries = {}
            for j, p in enumerate(phi.fiber_names):
                value = Poly.zero(phi.system, phi.order)
                for k in range(m):
                    value = value - dphi[k] * inverse[j][k]
                entries[p] = value
            fields.append(Derivation(phi.system, 0, entries))
        return ConnectionOneForm(phi.base_names, phi.fiber_names, fields, phi.order)

    @staticmethod
    def taylor_pullback(phi: FormalExpMap, f: Poly) -> Poly:
        """
        Compose a base function with the exponential map, truncated at N.

        Raises:
            ValidationError: If f uses coordinates other than base coordinates
                and parameters
        """
        allowed = set(phi.base_names) | set(phi.parameters)
        extra = f.variables() - allowed
        if extra:
            raise ValidationError(f"Taylor pullback of a function of non-base coordinates {sorted(extra)}")
        comps = phi.components()
        assignment = {x: comps[i] for i, x in enumerate(phi.base_names) if x in f.system}
        return GradedAlgebra.substitute(f, assignment, phi.order, target=phi.system)

    @staticmethod
    def _one_form(phi: FormalExpMap, parts: Sequence[Poly]) -> Poly:
        """sum_l dx^l parts[l] over the form system."""
        forms = phi.form_system
        total = Poly.zero(forms)
        for dx, part in zip(phi.differential_names, parts):
            total = total + Poly.coordinate(forms, dx) * part.embed(forms)
        return total

    @staticmethod
    def check_flatness(R: ConnectionOneForm) -> Report:
        """Check d_x R + 1/2 [R, R] = 0 up to order N - 1."""
        cut = R.order - 1
        residuals: Dict[str, Poly] = {}
        base = R.base_names
        for ell in range(len(base)):
            for m in range(ell + 1, len(base)):
                term = (partial_derivation(R.component(m), base[ell])
                        - partial_derivation(R.component(ell), base[m])
                        + R.component(ell).bracket(R.component(m)))
                for p, poly in term.items():
                    residuals[f"d{base[ell]}^d{base[m]} d/d{p}"] = poly.truncate(cut)
        logger.debug("Flatness residual computed for %d direction pairs", len(residuals))
        return Report.from_residual("flatness", residuals, cut)

    @staticmethod
    def d_closed_residual(R: ConnectionOneForm, phi: FormalExpMap, sigma: Poly) -> Poly:
        """The 1-form d_x sigma + R(sigma), truncated at N - 1."""
        if sigma.system != phi.system:
            sigma = sigma.embed(phi.system)
        cut = phi.order - 1
        parts = [(sigma.derive(x) + R.apply(ell, sigma)).truncate(cut) for ell, x in enumerate(phi.base_names)]
        return FormalGeometry._one_form(phi, parts)

    @staticmethod
    def check_d_closed(R: ConnectionOneForm, phi: FormalExpMap, f: Optional[Poly] = None,
                       sigma: Optional[Poly] = None) -> Report:
        """
        Check that a section is flat for D = d_x + R.

        Args:
            f: Base function; sigma defaults to its Taylor pullback
            sigma: Section to test directly instead of a pullback

        Raises:
            ValidationError: If neither f nor sigma is given
        """
        if sigma is None:
            if f is None:
                raise ValidationError("check_d_closed needs a function or a section")
            sigma = FormalGeometry.taylor_pullback(phi, f)
        residual = FormalGeometry.d_closed_residual(R, phi, sigma)
        return Report.from_residual("d_closed", residual, phi.order - 1)

    @staticmethod
    def homotopy_operators(phi: FormalExpMap) -> Tuple[Derivation, Derivation]:
        """delta = dx^i d/dp^i and its contraction partner p^i d/d(dx^i)."""
        forms = phi.form_system
        delta = Derivation(forms, 1, {p: Poly.coordinate(forms, dx)
                                      for p, dx in zip(phi.fiber_names, phi.differential_names)})
        delta_star = Derivation(forms, -1, {dx: Poly.coordinate(forms, p)
                                            for p, dx in zip(phi.fiber_names, phi.differential_names)})
        return delta, delta_star

    @staticmethod
    def homotopy_identity(sigma: Poly, phi: FormalExpMap) -> Report:
        """
        Check (delta delta* + delta* delta) sigma = (r + s) sigma.

        Raises:
            ValidationError: If sigma is not of a single bidegree (r, s)
        """
        forms = phi.form_system
        if sigma.system != forms:
            sigma = sigma.embed(forms)
        dx_idx = {forms.index(n) for n in phi.differential_names}
        p_idx = {forms.index(n) for n in phi.fiber_names}
        bidegrees = set()
        for (mono, _, _) in sigma.terms:
            r = sum(e for i, e in mono if i in dx_idx)
            s = sum(e for i, e in mono if i in p_idx)
            bidegrees.add((r, s))
        if len(bidegrees) > 1:
            raise ValidationError(f"Section is not of a single bidegree: {sorted(bidegrees)}")
        r, s = bidegrees.pop() if bidegrees else (0, 0)
        delta, delta_star = FormalGeometry.homotopy_operators(phi)
        lhs = delta.apply(delta_star.apply(sigma)) + delta_star.apply(delta.apply(sigma))
        report = Report.from_residual("homotopy", lhs - sigma * (r + s))
        report.add_note(f"bidegree ({r}, {s})")
        return report

    @staticmethod
    def family_generator(phi: FormalExpMap, parameter: str = "t",
                         f: Optional[Poly] = None) -> Tuple[Derivation, Report]:
        """
        Generator C of a family of exponential maps and its identities.

        C^j = -(J^-1)^j_k d(phi^k)/dt. Verifies dR_l/dt = d_l C + [R_l, C]
        and d(sigma)/dt = -C(sigma) for sigma the pullback of f.

        Raises:
            ValidationError: If the parameter is not declared on phi
        """
        dphi = phi.parameter_derivative(parameter)
        inverse = FormalGeometry.invert_fiber_jacobian(phi)
        m = phi.dimension
        entries = {}
        for j, p in enumerate(phi.fiber_names):
            value = Poly.zero(phi.system, phi.order)
            for k in range(m):
                value = value - inverse[j][k] * dphi[k]
            entries[p] = value
        generator = Derivation(phi.system, 0, entries)

        R = FormalGeometry.compute_R(phi)
        cut = phi.order - 1
        residuals: Dict[str, Poly] = {}
        for ell, x in enumerate(phi.base_names):
            lhs = partial_derivation(R.component(ell), parameter)
            rhs = partial_derivation(generator, x) + R.component(ell).bracket(generator)
            for p, poly in (lhs - rhs).items():
                residuals[f"d{x} d/d{p}"] = poly.truncate(cut)
        if f is None:
            total = Poly.zero(phi.system)
            for x in phi.base_names:
                total = total + Poly.coordinate(phi.system, x)
            f = total ** 3
        sigma = FormalGeometry.taylor_pullback(phi, f)
        residuals["sigma"] = (sigma.derive(parameter) + generator.apply(sigma)).truncate(cut)
        return generator, Report.from_residual("family", residuals, cut)

    @staticmethod
    def pullback_volume(phi: FormalExpMap) -> FormalVolume:
        """The density det(J) of the pulled-back coordinate volume."""
        jac = phi.fiber_jacobian()
        m = phi.dimension
        det = Poly.zero(phi.system, phi.order)
        for perm in permutations(range(m)):
            term = Poly.constant(phi.system, permutation_sign(perm), phi.order)
            for row, col in enumerate(perm):
                term = term * jac[row][col]
            det = det + term
        return FormalVolume(det, phi.order)

    @staticmethod
    def volume_residual(R: ConnectionOneForm, volume: FormalVolume, phi: FormalExpMap) -> Poly:
        """The 1-form d_x rho + R(rho) + rho div R, truncated at N - 1."""
        rho = volume.density
        if rho.system != phi.system:
            rho = rho.embed(phi.system)
        cut = phi.order - 1
        parts = []
        for ell, x in enumerate(phi.base_names):
            div = Poly.zero(phi.system)
            for j, p in enumerate(phi.fiber_names):
                div = div + R.matrix_entry(ell, j).derive(p)
            parts.append((rho.derive(x) + R.apply(ell, rho) + rho * div).truncate(cut))
        return FormalGeometry._one_form(phi, parts)

    @staticmethod
    def check_volume_compatibility(R: ConnectionOneForm, volume: FormalVolume, phi: FormalExpMap) -> Report:
        """Check that the formal volume is preserved by D = d_x + R."""
        residual = FormalGeometry.volume_residual(R, volume, phi)
        return Report.from_residual("volume", residual, phi.order - 1)

    @staticmethod
    def random_base_function(phi: FormalExpMap, degree: int = 3, seed: int = 0) -> Poly:
        """A seeded random polynomial of the given degree in the base coordinates."""
        rng = np.random.default_rng(seed)
        system = phi.system
        result = Poly.zero(system)
        monomials: List[Dict[str, int]] = [{}]
        for _ in range(degree):
            monomials = [dict(mono, **{x: mono.get(x, 0) + 1}) for mono in monomials for x in phi.base_names]
        seen = set()
        for mono in monomials:
            key = tuple(sorted(mono.items()))
            if key in seen:
                continue
            seen.add(key)
            coeff = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
            if coeff:
                result = result + Poly.monomial(system, mono, coeff)
        return result
