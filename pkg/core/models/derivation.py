"""
Graded vector fields.

A Derivation of degree k assigns to each coordinate c a component X^c of
degree k + deg(c) and acts as X(f) = sum_c X^c * (left derivative of f by c).
"""

from typing import Dict, Iterator, Mapping, Optional, Tuple

from ..errors import GradedAlgebraError
from .graded_coordinate import CoordinateSystem
from .poly import Poly, min_order


class Derivation:
    """
    An immutable graded derivation of a polynomial algebra.

    Usage:
        d_x = Derivation(system, 0, {"x": Poly.constant(system, 1)})
        d_x(f)            # apply to a Poly
        X.bracket(Y)      # graded commutator
    """

    def __init__(self, system: CoordinateSystem, degree: int, components: Mapping[str, Poly] = None,
                 check_degrees: bool = True):
        """
        Initialize a derivation.

        Args:
            system: Coordinate system the derivation acts on
            degree: Degree of the derivation
            components: Map coordinate name -> component polynomial
            check_degrees: Verify that each component has degree degree + deg(c)

        Raises:
            GradedAlgebraError: On system mismatch or inconsistent component degrees
        """
        self._system = system
        self._degree = int(degree)
        comps: Dict[str, Poly] = {}
        for name, poly in (components or {}).items():
            system.index(name)
            if poly.system != system:
                raise GradedAlgebraError(f"Component for '{name}' lives on another coordinate system")
            if poly.is_zero():
                continue
            if check_degrees:
                expected = degree + system[name].degree
                found = poly.monomial_degrees()
                if found != {expected}:
                    raise GradedAlgebraError(
                        f"Component for '{name}' has degrees {sorted(found)}, expected {expected}")
            comps[name] = poly
        self._components = comps

    @classmethod
    def zero(cls, system: CoordinateSystem, degree: int = 0) -> 'Derivation':
        return cls(system, degree, {})

    @property
    def system(self) -> CoordinateSystem:
        return self._system

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def components(self) -> Dict[str, Poly]:
        """Get a copy of the nonzero components."""
        return dict(self._components)

    def component(self, name: str) -> Poly:
        """Component on a coordinate (zero when absent)."""
        self._system.index(name)
        return self._components.get(name, Poly.zero(self._system))

    def items(self) -> Iterator[Tuple[str, Poly]]:
        """Iterate components in declaration order."""
        for name in self._system.names:
            if name in self._components:
                yield name, self._components[name]

    def is_zero(self) -> bool:
        return not self._components

    def order(self) -> Optional[int]:
        """Smallest truncation order among the components."""
        result = None
        first = True
        for poly in self._components.values():
            result = poly.order if first else min_order(result, poly.order)
            first = False
        return result

    def apply(self, f: Poly) -> Poly:
        """
        Apply the derivation to a polynomial.

        Raises:
            GradedAlgebraError: On coordinate-system mismatch
        """
        if f.system != self._system:
            raise GradedAlgebraError("Coordinate system mismatch")
        result = Poly.zero(self._system, f.order)
        variables = f.variables()
        for name, comp in self._components.items():
            if name in variables:
                result = result + comp * f.derive(name)
        return result

    __call__ = apply

    def bracket(self, other: 'Derivation') -> 'Derivation':
        """
        Graded commutator [X, Y] = X o Y - (-1)^{|X||Y|} Y o X.

        The second-order parts cancel, so the result is returned through its
        components [X,Y]^c = X(Y^c) - (-1)^{|X||Y|} Y(X^c).
        """
        if other.system != self._system:
            raise GradedAlgebraError("Coordinate system mismatch")
        sign = -1 if (self._degree * other._degree) % 2 else 1
        comps = {}
        for name in self._system.names:
            value = self.apply(other.component(name)) - other.apply(self.component(name)) * sign
            if not value.is_zero():
                comps[name] = value
        return Derivation(self._system, self._degree + other._degree, comps, check_degrees=False)

    def __add__(self, other: 'Derivation') -> 'Derivation':
        if other.system != self._system:
            raise GradedAlgebraError("Coordinate system mismatch")
        if other.degree != self._degree and not (self.is_zero() or other.is_zero()):
            raise GradedAlgebraError("Cannot add derivations of different degree")
        degree = self._degree if not self.is_zero() else other.degree
        comps = dict(self._components)
        for name, poly in other._components.items():
            comps[name] = comps[name] + poly if name in comps else poly
        return Derivation(self._system, degree, comps, check_degrees=False)

    def __neg__(self) -> 'Derivation':
        return self.scale(-1)

    def __sub__(self, other: 'Derivation') -> 'Derivation':
        return self + (-other)

    def scale(self, factor) -> 'Derivation':
        """Multiply every component on the left by a scalar or a Poly."""
        comps = {}
        for name, poly in self._components.items():
            comps[name] = factor * poly if isinstance(factor, Poly) else poly.scale(factor)
        degree = self._degree + (factor.degree() if isinstance(factor, Poly) and not factor.is_zero() else 0)
        return Derivation(self._system, degree, comps, check_degrees=False)

    def truncate(self, order: Optional[int]) -> 'Derivation':
        return Derivation(self._system, self._degree,
                          {n: p.truncate(order) for n, p in self._components.items()}, check_degrees=False)

    def embed(self, target: CoordinateSystem) -> 'Derivation':
        """Re-express over a larger system (zero on the new coordinates)."""
        return Derivation(target, self._degree,
                          {n: p.embed(target) for n, p in self._components.items()}, check_degrees=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        if self._system != other._system:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self._degree == other._degree and self._components == other._components

    def __hash__(self) -> int:
        return hash((self._system, self._degree, frozenset(self._components)))

    def __str__(self) -> str:
        if not self._components:
            return "0"
        return " + ".join(f"({poly})*d/d{name}" for name, poly in self.items())

    def __repr__(self) -> str:
        return f"Derivation(degree={self._degree}, {self})"

    def to_dict(self) -> dict:
        """Convert to a dictionary."""
        return {'degree': self._degree, 'components': {n: str(p) for n, p in self.items()}}
