"""
Builders for AKSZ targets: Poisson sigma model and BF theory.

PSM on R^m (d = 2): coordinates x^i (degree 0), p_i (degree 1), Darboux
pairs (p_i, x^i) and Theta = 1/2 pi^{ij}(x) p_i p_j.

BF for a Lie algebra g (source dimension d): coordinates x^k (degree 1),
xs_k (degree d - 2), pairs (xs_k, x^k) and Theta = 1/2 xs_k f^k_ij x^i x^j.
"""

import logging
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

from ...errors import ValidationError
from ...models.graded_coordinate import BASE, CoordinateSystem, GradedCoordinate
from ...models.lie_structure import LieStructure
from ...models.poly import Poly
from ...models.symplectic import ConstantSymplectic
from ...models.target_spec import TargetSpec
from ..bv.bv_operations import BVOperations

logger = logging.getLogger(__name__)

BivectorEntry = Union[int, Fraction, Poly]


class AKSZTargets:
    """Static builders for target specifications."""

    @staticmethod
    def psm_system(m: int) -> CoordinateSystem:
        """x1..xm of degree 0 and p1..pm of degree 1."""
        return CoordinateSystem([GradedCoordinate(f"x{i + 1}", 0, BASE) for i in range(m)]
                                + [GradedCoordinate(f"p{i + 1}", 1, BASE) for i in range(m)])

    @staticmethod
    def build_psm_target(pi: Mapping[Tuple[int, int], BivectorEntry], m: int,
                         name: str = "psm") -> TargetSpec:
        """
        Build and certify the Poisson sigma model target.

        Args:
            pi: Map (i, j) -> pi^{ij}, 0-based; entries are numbers or
                polynomials over psm_system(m) in the x coordinates
            m: Dimension of the Poisson manifold

        Raises:
            ValidationError: If pi is not antisymmetric or uses p coordinates
        """
        system = AKSZTargets.psm_system(m)
        entries: Dict[Tuple[int, int], Poly] = {}
        for (i, j), value in pi.items():
            if not (0 <= i < m and 0 <= j < m):
                raise ValidationError(f"Bivector index out of range: {(i, j)}")
            poly = value if isinstance(value, Poly) else Poly.constant(system, Fraction(value))
            if poly.system != system:
                poly = poly.embed(system)
            if any(v.startswith("p") for v in poly.variables()):
                raise ValidationError("Bivector entries must depend on x only")
            if i == j and not poly.is_zero():
                raise ValidationError(f"Diagonal bivector entry pi^{i + 1}{i + 1} must vanish")
            if (j, i) in entries and entries[(j, i)] != -poly:
                raise ValidationError(f"Bivector is not antisymmetric at {(i + 1, j + 1)}")
            entries[(i, j)] = poly
            entries[(j, i)] = -poly
        theta = Poly.zero(system)
        for (i, j), poly in entries.items():
            if i < j:
                theta = theta + poly * Poly.coordinate(system, f"p{i + 1}") * Poly.coordinate(system, f"p{j + 1}")
        omega = ConstantSymplectic.from_darboux_pairs(system, 1, [(f"p{i + 1}", f"x{i + 1}") for i in range(m)])
        report = BVOperations.check_master_equation(omega, theta)
        logger.debug("PSM target on R^%d: certification %s", m, report.status)
        return TargetSpec(name, 2, omega, theta, [(f"x{i + 1}", f"p{i + 1}") for i in range(m)], report)

    @staticmethod
    def bivector_entry(target: TargetSpec, i: int, j: int) -> Poly:
        """Read pi^{ij} back from a PSM target (coefficient of p_i p_j)."""
        theta = target.theta
        system = target.system
        p_i, p_j = f"p{i + 1}", f"p{j + 1}"
        if i == j:
            return Poly.zero(system)
        return theta.derive(p_i).derive(p_j)

    @staticmethod
    def bf_system(n: int, d: int) -> CoordinateSystem:
        """x1..xn of degree 1 and xs1..xsn of degree d - 2."""
        return CoordinateSystem([GradedCoordinate(f"x{i + 1}", 1, BASE) for i in range(n)]
                                + [GradedCoordinate(f"xs{i + 1}", d - 2, BASE) for i in range(n)])

    @staticmethod
    def build_bf_target(g: LieStructure, d: int, name: Optional[str] = None) -> TargetSpec:
        """
        Build the BF target for structure constants g in source dimension d.

        The Jacobi identity is checked by certification, not at construction.

        Raises:
            ValidationError: If d < 1
        """
        if d < 1:
            raise ValidationError("BF source dimension must be positive")
        n = g.dimension
        system = AKSZTargets.bf_system(n, d)
        theta = Poly.zero(system)
        half = Fraction(1, 2)
        for (k, i, j), value in g.items():
            term = (Poly.coordinate(system, f"xs{k + 1}") * Poly.coordinate(system, f"x{i + 1}")
                    * Poly.coordinate(system, f"x{j + 1}"))
            theta = theta + term * (value * half)
        omega = ConstantSymplectic.from_darboux_pairs(system, d - 1,
                                                      [(f"xs{k + 1}", f"x{k + 1}") for k in range(n)])
        report = BVOperations.check_master_equation(omega, theta)
        split = [(f"xs{k + 1}", f"x{k + 1}") for k in range(n)] if d == 2 else []
        logger.debug("BF target for %s, d=%d: certification %s", g.name, d, report.status)
        return TargetSpec(name or f"bf_{g.name}_d{d}", d, omega, theta, split, report)
