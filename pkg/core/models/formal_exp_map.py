"""
Truncated formal exponential maps.

    phi^i(x, p) = x^i + p^i + sum_{k>=2} (1/k!) phi^i_{j1...jk}(x) p^j1 ... p^jk

Coefficients are stored per sorted lower-index tuple; they may be rationals
or polynomials in the base coordinates and in extra parameters (such as a
family parameter t).
"""

import logging
from fractions import Fraction
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import DEFAULT_SETTINGS
from ..errors import ValidationError
from .graded_coordinate import BASE, FIBER, CoordinateSystem, GradedCoordinate
from .poly import Poly

logger = logging.getLogger(__name__)

CoefficientKey = Tuple[int, Tuple[int, ...]]
CoefficientValue = Union[int, Fraction, Poly]


def multiplicity_factor(indices: Tuple[int, ...]) -> int:
    """Product of factorials of index multiplicities."""
    result = 1
    for idx in set(indices):
        result *= factorial(indices.count(idx))
    return result


class FormalExpMap:
    """
    A formal exponential map truncated at fiber order N.

    Usage:
        phi = FormalExpMap(["x1"], order=4, coefficients={(0, (0, 0)): 2})
        phi.components()   # [x1 + p1 + p1^2]
    """

    def __init__(self, base_names: Sequence[str], order: int = DEFAULT_SETTINGS.order,
                 coefficients: Optional[Mapping[CoefficientKey, CoefficientValue]] = None,
                 fiber_names: Optional[Sequence[str]] = None,
                 parameters: Sequence[str] = ()):
        """
        Initialize a formal exponential map.

        Args:
            base_names: Base coordinate names x^1..x^m (degree 0)
            order: Truncation order N >= 1
            coefficients: Map (i, (j1, ..., jk)) -> phi^i_{j1...jk}, 0-based,
                arity 2..N; index tuples in any order
            fiber_names: Fiber coordinate names (default p1..pm)
            parameters: Extra degree-0 base symbols coefficients may use

        Raises:
            ValidationError: On bad indices, arity, inconsistent symmetric
                entries or coefficients using unknown coordinates
        """
        if order < 1:
            raise ValidationError(f"Exponential map order must be >= 1, got {order}")
        if not base_names:
            raise ValidationError("Exponential map needs at least one base coordinate")
        self._base = list(base_names)
        self._fiber = list(fiber_names) if fiber_names else [f"p{i + 1}" for i in range(len(self._base))]
        if len(self._fiber) != len(self._base):
            raise ValidationError("Base and fiber dimensions differ")
        self._params = list(parameters)
        self._order = order
        self._system = CoordinateSystem(
            [GradedCoordinate(n, 0, BASE) for n in self._base + self._params]
            + [GradedCoordinate(n, 0, FIBER) for n in self._fiber])
        self._forms = self._system.extend(GradedCoordinate(f"d{n}", 1, BASE) for n in self._base)
        allowed = set(self._base) | set(self._params)
        m = len(self._base)
        coeffs: Dict[CoefficientKey, Poly] = {}
        for (i, lower), value in (coefficients or {}).items():
            lower = tuple(sorted(lower))
            if not 0 <= i < m or any(not 0 <= j < m for j in lower):
                raise ValidationError(f"Coefficient index out of range: {(i, lower)}")
            if not 2 <= len(lower) <= order:
                raise ValidationError(f"Coefficient arity {len(lower)} outside 2..{order}")
            if isinstance(value, Poly):
                extra = value.variables() - allowed
                if extra:
                    raise ValidationError(f"Coefficient uses non-base coordinates {sorted(extra)}")
                poly = value.embed(self._system) if value.system != self._system else value
            else:
                poly = Poly.constant(self._system, Fraction(value))
            poly = poly.with_order(order)
            if (i, lower) in coeffs and coeffs[(i, lower)] != poly:
                raise ValidationError(f"Inconsistent symmetric entries for coefficient {(i, lower)}")
            if not poly.is_zero():
                coeffs[(i, lower)] = poly
        self._coefficients = coeffs
        self._components: Optional[List[Poly]] = None

    # -------------------------------------------------------------- builders

    @classmethod
    def linear(cls, base_names: Sequence[str], order: int = DEFAULT_SETTINGS.order,
               fiber_names: Optional[Sequence[str]] = None) -> 'FormalExpMap':
        """The map phi(x, p) = x + p."""
        return cls(base_names, order, {}, fiber_names)

    @classmethod
    def random(cls, base_names: Sequence[str], order: int = DEFAULT_SETTINGS.order, seed: int = 0,
               max_arity: int = 3, x_dependent: bool = True,
               fiber_names: Optional[Sequence[str]] = None) -> 'FormalExpMap':
        """
        A seeded random map with small rational coefficients.

        Args:
            max_arity: Highest Taylor arity with nonzero coefficients
            x_dependent: Let quadratic coefficients depend linearly on x
        """
        rng = np.random.default_rng(seed)
        m = len(base_names)
        template = cls(base_names, order, {}, fiber_names)
        coefficients: Dict[CoefficientKey, Poly] = {}
        for arity in range(2, min(max_arity, order) + 1):
            for lower in _sorted_tuples(m, arity):
                for i in range(m):
                    value = Poly.constant(template.system, Fraction(int(rng.integers(-3, 4)), 2))
                    if x_dependent and arity == 2:
                        for name in base_names:
                            c = int(rng.integers(-1, 2))
                            if c:
                                value = value + Poly.coordinate(template.system, name) * Fraction(c, 2)
                    coefficients[(i, lower)] = value
        logger.debug("Random exponential map: dim %d, order %d, seed %d", m, order, seed)
        return cls(base_names, order, coefficients, fiber_names)

    @classmethod
    def interpolate(cls, start: 'FormalExpMap', end: 'FormalExpMap', parameter: str = "t") -> 'FormalExpMap':
        """
        The family phi_t = (1 - t) phi_start + t phi_end.

        Raises:
            ValidationError: If the maps have different bases or orders
        """
        if start.base_names != end.base_names or start.order != end.order:
            raise ValidationError("Cannot interpolate maps on different bases")
        family = cls(start.base_names, start.order, {}, start.fiber_names, [parameter])
        t = Poly.coordinate(family.system, parameter)
        coefficients: Dict[CoefficientKey, Poly] = {}
        for key in set(start.coefficients) | set(end.coefficients):
            a = start.coefficient(*key).embed(family.system)
            b = end.coefficient(*key).embed(family.system)
            coefficients[key] = a * (1 - t) + b * t
        return cls(start.base_names, start.order, coefficients, start.fiber_names, [parameter])

    # ------------------------------------------------------------ properties

    @property
    def base_names(self) -> List[str]:
        return list(self._base)

    @property
    def fiber_names(self) -> List[str]:
        return list(self._fiber)

    @property
    def differential_names(self) -> List[str]:
        """Names of the formal base differentials dx^l."""
        return [f"d{n}" for n in self._base]

    @property
    def parameters(self) -> List[str]:
        return list(self._params)

    @property
    def dimension(self) -> int:
        return len(self._base)

    @property
    def order(self) -> int:
        return self._order

    @property
    def system(self) -> CoordinateSystem:
        """Base coordinates, parameters and fiber coordinates."""
        return self._system

    @property
    def form_system(self) -> CoordinateSystem:
        """The system extended by the odd base differentials."""
        return self._forms

    @property
    def coefficients(self) -> Dict[CoefficientKey, Poly]:
        return dict(self._coefficients)

    def coefficient(self, i: int, lower: Tuple[int, ...]) -> Poly:
        return self._coefficients.get((i, tuple(sorted(lower))), Poly.zero(self._system, self._order))

    def is_linear(self) -> bool:
        return not self._coefficients

    # ----------------------------------------------------------- components

    def components(self) -> List[Poly]:
        """The polynomials phi^i(x, p) truncated at order N."""
        if self._components is None:
            comps = []
            for i, (x, p) in enumerate(zip(self._base, self._fiber)):
                phi = Poly.coordinate(self._system, x, self._order) + Poly.coordinate(self._system, p)
                comps.append(phi)
            for (i, lower), value in sorted(self._coefficients.items()):
                exps: Dict[str, int] = {}
                for j in lower:
                    exps[self._fiber[j]] = exps.get(self._fiber[j], 0) + 1
                mono = Poly.monomial(self._system, exps, Fraction(1, multiplicity_factor(lower)), self._order)
                comps[i] = comps[i] + value * mono
            self._components = comps
        return list(self._components)

    def fiber_jacobian(self) -> List[List[Poly]]:
        """J^k_j = d phi^k / d p^j."""
        comps = self.components()
        return [[comps[k].derive(p) for p in self._fiber] for k in range(self.dimension)]

    def parameter_derivative(self, parameter: str) -> List[Poly]:
        """
        d phi^k / d parameter.

        Raises:
            ValidationError: If the parameter is not declared
        """
        if parameter not in self._params:
            raise ValidationError(f"'{parameter}' is not a parameter of this exponential map")
        return [c.derive(parameter) for c in self.components()]

    def __repr__(self) -> str:
        return f"FormalExpMap(base={self._base}, order={self._order}, terms={len(self._coefficients)})"

    def to_dict(self) -> dict:
        """Convert to a dictionary (0-based indices)."""
        return {
            'base': list(self._base),
            'fiber': list(self._fiber),
            'parameters': list(self._params),
            'order': self._order,
            'coefficients': [
                {'index': i, 'lower': list(lower), 'value': str(value)}
                for (i, lower), value in sorted(self._coefficients.items())
            ],
        }


def _sorted_tuples(m: int, arity: int) -> List[Tuple[int, ...]]:
    """All non-decreasing index tuples of a given length."""
    if arity == 0:
        return [()]
    result = []
    for head in _sorted_tuples(m, arity - 1):
        start = head[-1] if head else 0
        for j in range(start, m):
            result.append(head + (j,))
    return result
