"""
Fiber integrals, effective actions and the differential quantum master
equation.

Fiber integral over a Lagrangian L, a = i/hbar:

    int_L P exp(a S) = prefactor * exp(a exponent)

Odd variables are integrated by Berezin integration of the finite series
exp(a S_coupled). Even variables must enter S_free as a Gaussian
1/2 z K z + J z + s0 with rational K; the square is completed and
polynomial prefactors are integrated by Wick's theorem with covariance
i hbar K^-1.

Effective action on factor 1 of a good splitting:

    S_eff = exponent - i hbar log(prefactor / z0)

dQME for O = P exp(a S), eps = (-1)^d, per homogeneous part of P:

    d_y O - eps i hbar Delta O = E exp(a S)
    E = d_y P + (-1)^|P| a P d_y S
        - eps i hbar [Delta P + (-1)^|P| P (a Delta S + a^2/2 {S, S}) + (-1)^|P| a {P, S}]
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ...errors import UnsupportedIntegralError, ValidationError
from ...models.finite_bv_theory import FiniteBVTheory
from ...models.graded_coordinate import CoordinateSystem
from ...models.poly import Poly
from ...models.report import FAIL, PASS, PRECONDITION_FAILED, Report
from ...models.scalar import Scalar
from ...models.symplectic import BVLaplacian, ConstantSymplectic, invert_rational_matrix
from ..aksz.formal_global import FormalGlobal, fluctuation_name
from ..bv.bv_operations import BVOperations
from ..graded.fiber_integration import FiberIntegration
from ..graded.graded_algebra import GradedAlgebra
from .auxiliary import FormalGlobalAuxiliary

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _i_over_hbar(system: CoordinateSystem) -> Poly:
    return Poly.imaginary_unit(system) * Poly.hbar(system, -1)


def _i_hbar(system: CoordinateSystem) -> Poly:
    return Poly.imaginary_unit(system) * Poly.hbar(system)


def _split_by_variables(poly: Poly, names: Sequence[str]) -> Dict[int, Poly]:
    """Split by total exponent in the given coordinates."""
    system = poly.system
    indices = {system.index(n) for n in names}
    parts: Dict[int, dict] = {}
    for key, value in poly.terms.items():
        weight = sum(e for i, e in key[0] if i in indices)
        parts.setdefault(weight, {})[key] = value
    return {w: Poly(system, terms, poly.order) for w, terms in sorted(parts.items())}


def _log_one_plus(u: Poly) -> Poly:
    """
    log(1 + u) for nilpotent u.

    Every term of u must contain an odd coordinate or have positive fiber
    weight under a finite truncation order; the series then stops after
    (#odd coordinates + order) terms.

    Raises:
        UnsupportedIntegralError: If u is not nilpotent in that sense
    """
    system = u.system
    odd, fiber = system.odd_flags, system.fiber_flags
    for (mono, _, _), _ in u.items():
        has_odd = any(odd[idx] for idx, _ in mono)
        has_weight = u.order is not None and any(fiber[idx] for idx, _ in mono)
        if not (has_odd or has_weight):
            raise UnsupportedIntegralError(f"log(1 + u) has a non-nilpotent term in {u.system.names}")
    bound = sum(odd) + (u.order or 0)
    log = Poly.zero(system, u.order)
    power = Poly.constant(system, 1, u.order)
    for m in range(1, bound + 1):
        power = power * u
        if power.is_zero():
            break
        log = log + power * Fraction(-1 if m % 2 == 0 else 1, m)
    return log


@dataclass(frozen=True)
class FiberIntegral:
    """int_L P exp(a S) = prefactor exp(a exponent) over the integrated variables."""

    prefactor: Poly
    exponent: Poly
    integrated: Tuple[str, ...]
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class GlobalObservable:
    """
    O = prefactor exp((i/hbar) exponent) over the ambient fields and the
    background (y, dy), with the ambient structure for Delta.
    """

    prefactor: Poly
    exponent: Poly
    omega: ConstantSymplectic
    differentials: Dict[str, str]
    order: int
    dimension: int
    notes: Tuple[str, ...] = ()


class QuantumObservables:
    """Static fiber-integral, effective-action and dQME operations."""

    # -------------------------------------------------------- fiber integral

    @staticmethod
    def _unit_inverse(z0: Scalar, system: CoordinateSystem) -> Poly:
        """1/z0 for a single-term scalar c hbar^k i^j."""
        terms = z0.terms
        if len(terms) != 1:
            raise UnsupportedIntegralError(f"Normalization {z0} is not a single monomial in hbar and i")
        (k, im), c = next(iter(terms.items()))
        value = Fraction(1) / c * (-1 if im else 1)
        return Poly.from_scalar(system, Scalar({(-k, im): value}))

    @staticmethod
    def _kernel(free: Poly, evens: List[str]) -> List[List[Fraction]]:
        zero = list(evens)
        rows = []
        for z in evens:
            row = []
            for w in evens:
                entry = free.derive(w).derive(z).set_zero(zero)
                if not entry.is_constant() or not entry.constant_term().is_rational():
                    raise UnsupportedIntegralError(f"Gaussian kernel entry ({z}, {w}) is not a rational constant")
                row.append(entry.constant_term().rational())
            rows.append(row)
        return rows

    @staticmethod
    def fiber_integral(action: Poly, variables: Sequence[str], insertion: Optional[Poly] = None) -> FiberIntegral:
        """
        Integrate insertion * exp((i/hbar) action) over the given variables.

        Odd variables are integrated in the listed order as a Berezin
        measure; even ones as a formal Gaussian, with the normalization
        det(K)^(-1/2) dropped.

        Raises:
            UnsupportedIntegralError: If the even sector is not a
                non-degenerate Gaussian with rational kernel
        """
        system = action.system
        order = action.order
        odds = [n for n in variables if system[n].is_odd]
        evens = [n for n in variables if not system[n].is_odd]
        a = _i_over_hbar(system)
        integrand = insertion if insertion is not None else Poly.constant(system, 1, order)

        parts = _split_by_variables(action, odds)
        free = parts.pop(0, Poly.zero(system, order))
        if odds:
            coupled = Poly.zero(system, order)
            for part in parts.values():
                coupled = coupled + part
            exponential = Poly.constant(system, 1, order)
            power = Poly.constant(system, 1, order)
            for m in range(1, len(odds) + 1):
                power = power * a * coupled
                if power.is_zero():
                    break
                exponential = exponential + power * Fraction(1, factorial(m))
            integrand = FiberIntegration.berezin_integral(integrand * exponential, odds)
        if not evens:
            return FiberIntegral(integrand, free, tuple(variables))

        even_parts = _split_by_variables(free, evens)
        if any(w > 2 for w in even_parts):
            raise UnsupportedIntegralError("Even sector is not Gaussian (terms above quadratic order)")
        s0 = even_parts.get(0, Poly.zero(system, order))
        linear = [free.derive(z).set_zero(evens) for z in evens]
        try:
            inverse = invert_rational_matrix(QuantumObservables._kernel(free, evens))
        except ValidationError:
            raise UnsupportedIntegralError("Gaussian kernel is degenerate") from None
        quadratic = Poly.zero(system, order)
        shift: Dict[str, Poly] = {}
        cov: Dict[Tuple[str, str], Scalar] = {}
        for i, z in enumerate(evens):
            moved = Poly.zero(system, order)
            for j, w in enumerate(evens):
                if not inverse[i][j]:
                    continue
                quadratic = quadratic + linear[i] * linear[j] * inverse[i][j]
                moved = moved + linear[j] * inverse[i][j]
                if i <= j:
                    cov[(z, w)] = Scalar({(1, 1): inverse[i][j]})
            if not moved.is_zero():
                shift[z] = Poly.coordinate(system, z, order) - moved
        if shift:
            integrand = GradedAlgebra.substitute(integrand, shift, order, target=system)
        prefactor = FiberIntegration.wick_integrate(integrand, cov, evens)
        return FiberIntegral(prefactor, s0 - quadratic * HALF, tuple(variables),
                             ("gaussian normalization det(K)^(-1/2) dropped",))

    # ------------------------------------------------------ effective action

    @staticmethod
    def _reduced(theory: FiniteBVTheory, removed: Sequence[str]) -> Tuple[CoordinateSystem, ConstantSymplectic]:
        removed = set(removed)
        system = CoordinateSystem([c for c in theory.system if c.name not in removed])
        bivector = {(mu, nu): v for mu, nu, v in theory.omega.bivector_items()
                    if mu not in removed and nu not in removed}
        return system, ConstantSymplectic(system, theory.omega.degree, bivector)

    @staticmethod
    def _check_splitting(theory: FiniteBVTheory, factor: Sequence[str], antifields: Sequence[str]) -> None:
        chosen = set(factor)
        for name in list(chosen) + list(antifields):
            if name not in theory.system:
                raise ValidationError(f"Unknown field '{name}' in splitting")
        for name in antifields:
            if name not in chosen:
                raise ValidationError(f"Antifield '{name}' is not in the integrated factor")
        for mu, nu, _ in theory.omega.bivector_items():
            if (mu in chosen) != (nu in chosen):
                raise ValidationError(f"Splitting separates the pair ({mu}, {nu})")

    @staticmethod
    def effective_action(theory: FiniteBVTheory, factor: Sequence[str], antifields: Sequence[str],
                         insertion: Optional[Poly] = None, name: Optional[str] = None) -> FiniteBVTheory:
        """
        Integrate out the second factor of a good splitting.

        The log series stops by nilpotency of the normalized integral: odd
        coordinates and the fiber truncation order bound its length.

        Args:
            factor: Fields of the second symplectic factor
            antifields: Fields of the factor set to zero (the Lagrangian)
            insertion: Polynomial prefactor of exp((i/hbar) S) in the integrand

        Raises:
            ValidationError: If the splitting separates a Darboux pair
            UnsupportedIntegralError: If the integral is not Berezin times
                Gaussian, its normalization vanishes or its log does not terminate
        """
        if not factor:
            return theory
        QuantumObservables._check_splitting(theory, factor, antifields)
        action = theory.action.set_zero(antifields)
        if insertion is not None:
            insertion = insertion.set_zero(antifields)
        variables = [n for n in theory.system.names if n in set(factor) - set(antifields)]
        integral = QuantumObservables.fiber_integral(action, variables, insertion)
        system = theory.system
        notes = list(integral.notes)
        effective = integral.exponent
        details: Dict[str, object] = {'integrated': variables}
        if not integral.prefactor.is_constant() or integral.prefactor.constant_term() != 1:
            z0 = integral.prefactor.constant_term()
            if z0.is_zero():
                raise UnsupportedIntegralError("Fiber integral has vanishing normalization")
            u = integral.prefactor * QuantumObservables._unit_inverse(z0, system) - 1
            effective = effective - _i_hbar(system) * _log_one_plus(u)
            notes.insert(0, f"normalization {z0}")
            details['normalization'] = str(z0)
        reduced, omega = QuantumObservables._reduced(theory, factor)
        effective = effective.embed(reduced)
        components = {k: v for k, v in theory.components.items() if v in reduced}
        report = Report("effective_action", PASS, notes=notes, details=details)
        logger.info("Effective action of %s over %d variables: %d terms", theory.name, len(variables),
                    len(effective))
        return FiniteBVTheory(name or f"{theory.name}/eff", omega, effective, components=components,
                              reports=[report], degree=omega.degree)

    # ------------------------------------------------------ global observable

    @staticmethod
    def formal_global_observable(data: FormalGlobalAuxiliary, ambient: FiniteBVTheory,
                                 antifields: Optional[Sequence[str]] = None,
                                 insertion: Optional[Poly] = None) -> GlobalObservable:
        """
        int_L insertion exp((i/hbar) S^global) over the auxiliary fields.

        The default Lagrangian sets the components of the base fluctuations
        to zero and integrates their partners.

        Args:
            antifields: Auxiliary fields vanishing on L
            insertion: Polynomial over the auxiliary system

        Raises:
            ValidationError: If L does not contain exactly one field of each
                auxiliary Darboux pair
            UnsupportedIntegralError: If the fiber integral is not supported
        """
        theory = data.theory
        system = theory.system
        aux = set(theory.components.values())
        if antifields is None:
            bases = {fluctuation_name(y) for y in data.differentials}
            antifields = [name for (mu, _), name in theory.components.items() if mu in bases]
        chosen = set(antifields)
        stray = sorted(chosen - aux)
        if stray:
            raise ValidationError(f"Lagrangian fields {stray} are not auxiliary fields")
        for mu, nu, _ in theory.omega.bivector_items():
            if mu in aux and nu in aux and (mu in chosen) == (nu in chosen):
                raise ValidationError(f"Lagrangian must contain exactly one of ({mu}, {nu})")
        variables = [n for n in system.names if n in aux and n not in chosen]
        action = theory.action.set_zero(chosen)
        if insertion is not None:
            insertion = insertion.set_zero(chosen)
        integral = QuantumObservables.fiber_integral(action, variables, insertion)
        reduced = CoordinateSystem([c for c in system if c.name not in aux])
        omega = ConstantSymplectic(reduced, ambient.omega.degree,
                                   {(mu, nu): v for mu, nu, v in ambient.omega.bivector_items()})
        logger.info("Global observable of %s over %d auxiliary fields", theory.name, len(variables))
        return GlobalObservable(integral.prefactor.embed(reduced), integral.exponent.embed(reduced), omega,
                                dict(data.differentials), data.order, data.dimension, integral.notes)

    # ------------------------------------------------------------------ dQME

    @staticmethod
    def dqme_residual(action: Poly, laplacian: BVLaplacian, differentials: Mapping[str, str],
                      dimension: int, prefactor: Optional[Poly] = None, sign: Optional[int] = None) -> Poly:
        """
        E of the module docstring for O = P exp((i/hbar) S), summed over the
        homogeneous parts of P.

        Args:
            sign: eps, defaulting to (-1)^dimension
        """
        system = action.system
        eps = sign if sign is not None else (-1 if dimension % 2 else 1)
        p = prefactor if prefactor is not None else Poly.constant(system, 1)
        d_y = FormalGlobal.background_differential(system, differentials)
        omega = laplacian.omega
        a = _i_over_hbar(system)
        d_y_s = d_y.apply(action)
        curvature = a * laplacian.apply(action) + a * a * BVOperations.poisson_bracket(omega, action, action) * HALF
        residual = Poly.zero(system, action.order)
        for degree, part in p.homogeneous_parts().items():
            p_sign = -1 if degree % 2 else 1
            inner = (laplacian.apply(part) + part * curvature * p_sign
                     + a * BVOperations.poisson_bracket(omega, part, action) * p_sign)
            residual = residual + d_y.apply(part) + a * part * d_y_s * p_sign - _i_hbar(system) * inner * eps
        return residual

    @staticmethod
    def itemize(residual: Poly, differentials: Mapping[str, str]) -> Dict[str, Poly]:
        """Residual pieces per hbar power, real/imaginary part, form degree and fiber order."""
        items: Dict[str, Poly] = {}
        for (k, im), part in residual.scalar_parts().items():
            prefix = f"hbar^{k}{' i' if im else ''}"
            for label, piece in FormalGlobal.itemize(part, differentials).items():
                items[f"{prefix} {label}"] = piece
        return items

    @staticmethod
    def check_dqme(observable: GlobalObservable, precondition: Report) -> Report:
        """
        Check d_y O - (-1)^d i hbar Delta O = 0 up to fiber order N - 1.

        The volume-compatibility report must have passed; otherwise the
        result is precondition-failed. A failure that would vanish with the
        opposite sign stays a failure and carries a convention note.

        Raises:
            ValidationError: If the structure does not have degree -1
        """
        omega = observable.omega
        if omega.degree != -1:
            raise ValidationError(f"dQME needs a degree -1 structure, got {omega.degree}")
        cut = observable.order - 1
        if not precondition.passed:
            return Report("dqme", PRECONDITION_FAILED, cut,
                          notes=[f"volume compatibility: {precondition.status}"] + precondition.residual[:3])
        laplacian = BVLaplacian(omega)
        eps = -1 if observable.dimension % 2 else 1
        notes = list(observable.notes)
        if observable.prefactor.is_zero():
            notes.append("fiber integral vanishes")

        def residual(sign: int) -> Poly:
            return QuantumObservables.dqme_residual(observable.exponent, laplacian, observable.differentials,
                                                    observable.dimension, observable.prefactor, sign).truncate(cut)

        report = Report.from_residual("dqme", QuantumObservables.itemize(residual(eps), observable.differentials),
                                      cut, notes=notes, details={'sign': eps})
        if report.status == FAIL and residual(-eps).is_zero():
            logger.warning("dQME fails with (-1)^d = %d but holds with the opposite sign", eps)
            report = Report("dqme", FAIL, cut, residual=report.residual,
                            notes=notes + [f"convention: would hold with sign {-eps}"], details={'sign': eps})
        return report
