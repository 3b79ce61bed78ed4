"""
Sparse graded polynomials with exact coefficients.

A Poly maps (monomial, hbar power, imaginary flag) to a nonzero Fraction.
Products follow the Koszul rule of the coordinate system; the truncation
order bounds the total exponent in fiber-kind coordinates (None means no
truncation) and every arithmetic result keeps the smaller order of its
inputs.
"""

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Set, Tuple, Union

from ..errors import GradedAlgebraError
from .graded_coordinate import CoordinateSystem
from .monomial import ONE, Monomial, MonomialKey
from .scalar import Scalar, as_fraction, format_fraction

TermKey = Tuple[MonomialKey, int, int]
Coefficient = Union[int, Fraction, Scalar]


def min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    """Smaller of two truncation orders, None meaning unbounded."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Poly:
    """
    Immutable polynomial over a CoordinateSystem.

    Usage:
        system = CoordinateSystem.from_specs([("x", 0), ("xi", 1)])
        x = Poly.coordinate(system, "x")
        xi = Poly.coordinate(system, "xi")
        f = x * x * xi + Fraction(1, 2)
    """

    __slots__ = ('_system', '_terms', '_order')

    def __init__(self, system: CoordinateSystem, terms: Mapping[TermKey, Coefficient] = None,
                 order: Optional[int] = None):
        """
        Initialize a polynomial.

        Args:
            system: Coordinate system the monomials refer to
            terms: Map (monomial key, hbar power, imag flag) -> coefficient
            order: Fiber truncation order, None for no truncation
        """
        if order is not None and order < 0:
            raise GradedAlgebraError(f"Truncation order must be non-negative, got {order}")
        self._system = system
        self._order = order
        fiber = system.fiber_flags
        cleaned: Dict[TermKey, Fraction] = {}
        for key, value in (terms or {}).items():
            if isinstance(value, Scalar):
                raise GradedAlgebraError("Use Poly.from_scalar for Scalar coefficients")
            value = as_fraction(value)
            if not value:
                continue
            if order is not None and Monomial.weight(key[0], fiber) > order:
                continue
            cleaned[key] = value
        self._terms = cleaned

    @classmethod
    def _raw(cls, system: CoordinateSystem, terms: Dict[TermKey, Fraction], order: Optional[int]) -> 'Poly':
        poly = object.__new__(cls)
        poly._system = system
        poly._order = order
        poly._terms = {k: v for k, v in terms.items() if v}
        return poly

    # ------------------------------------------------------------------ builders

    @classmethod
    def zero(cls, system: CoordinateSystem, order: Optional[int] = None) -> 'Poly':
        return cls._raw(system, {}, order)

    @classmethod
    def constant(cls, system: CoordinateSystem, value: Coefficient, order: Optional[int] = None) -> 'Poly':
        """A constant polynomial (value may be a Scalar)."""
        return cls.from_scalar(system, Scalar.of(value), order)

    @classmethod
    def from_scalar(cls, system: CoordinateSystem, scalar: Scalar, order: Optional[int] = None,
                    monomial: MonomialKey = ONE) -> 'Poly':
        """Scalar times a monomial."""
        return cls(system, {(monomial, k, im): v for (k, im), v in scalar.terms.items()}, order)

    @classmethod
    def coordinate(cls, system: CoordinateSystem, name: str, order: Optional[int] = None) -> 'Poly':
        """The polynomial consisting of a single coordinate."""
        return cls(system, {(((system.index(name), 1),), 0, 0): 1}, order)

    @classmethod
    def monomial(cls, system: CoordinateSystem, exponents: Mapping[str, int],
                 coefficient: Coefficient = 1, order: Optional[int] = None) -> 'Poly':
        """
        A single monomial given by name -> exponent, in canonical order.

        Raises:
            GradedAlgebraError: If an odd coordinate has exponent > 1
        """
        indexed = {system.index(name): exp for name, exp in exponents.items()}
        sign, key = Monomial.from_exponents(indexed, system.odd_flags)
        if sign == 0:
            raise GradedAlgebraError("Odd coordinate raised to a power >= 2")
        return cls.from_scalar(system, Scalar.of(coefficient) * sign, order, key)

    @classmethod
    def hbar(cls, system: CoordinateSystem, power: int = 1, order: Optional[int] = None) -> 'Poly':
        return cls(system, {(ONE, power, 0): 1}, order)

    @classmethod
    def imaginary_unit(cls, system: CoordinateSystem, order: Optional[int] = None) -> 'Poly':
        return cls(system, {(ONE, 0, 1): 1}, order)

    # ---------------------------------------------------------------- properties

    @property
    def system(self) -> CoordinateSystem:
        return self._system

    @property
    def order(self) -> Optional[int]:
        return self._order

    @property
    def terms(self) -> Dict[TermKey, Fraction]:
        """Get a copy of the term map."""
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[TermKey, Fraction]]:
        """Iterate terms in canonical order."""
        n = len(self._system)
        return iter(sorted(self._terms.items(),
                           key=lambda kv: (Monomial.sort_key(kv[0][0], n), kv[0][1], kv[0][2])))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def variables(self) -> Set[str]:
        """Names of coordinates that occur."""
        names = self._system.names
        return {names[idx] for (mono, _, _) in self._terms for idx, _ in mono}

    def is_constant(self) -> bool:
        return all(mono == ONE for (mono, _, _) in self._terms)

    def constant_term(self) -> Scalar:
        """The coefficient of the empty monomial."""
        return Scalar({(k, im): v for (mono, k, im), v in self._terms.items() if mono == ONE})

    def has_quantum_terms(self) -> bool:
        """Check whether hbar or i occur."""
        return any(k != 0 or im for (_, k, im) in self._terms)

    # ---------------------------------------------------------------- grading

    def monomial_degrees(self) -> Set[int]:
        degrees = self._system.degrees
        return {Monomial.degree(mono, degrees) for (mono, _, _) in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.monomial_degrees()) <= 1

    def degree(self) -> int:
        """
        Ghost number of a homogeneous polynomial (0 for the zero polynomial).

        Raises:
            GradedAlgebraError: If the polynomial is not homogeneous
        """
        degrees = self.monomial_degrees()
        if len(degrees) > 1:
            raise GradedAlgebraError(f"Polynomial is not homogeneous (degrees {sorted(degrees)})")
        return degrees.pop() if degrees else 0

    def homogeneous_part(self, degree: int) -> 'Poly':
        degrees = self._system.degrees
        return Poly._raw(self._system, {k: v for k, v in self._terms.items()
                                        if Monomial.degree(k[0], degrees) == degree}, self._order)

    def homogeneous_parts(self) -> Dict[int, 'Poly']:
        return {deg: self.homogeneous_part(deg) for deg in sorted(self.monomial_degrees())}

    def weight_part(self, weight: int) -> 'Poly':
        """Terms of a given total fiber exponent."""
        fiber = self._system.fiber_flags
        return Poly._raw(self._system, {k: v for k, v in self._terms.items()
                                        if Monomial.weight(k[0], fiber) == weight}, self._order)

    def max_weight(self) -> int:
        fiber = self._system.fiber_flags
        return max((Monomial.weight(k[0], fiber) for k in self._terms), default=0)

    def truncate(self, order: Optional[int]) -> 'Poly':
        """Drop terms of fiber weight above order and lower the truncation order."""
        return Poly(self._system, self._terms, min_order(self._order, order))

    def with_order(self, order: Optional[int]) -> 'Poly':
        """Same terms (truncated if needed) with a new truncation order."""
        return Poly(self._system, self._terms, order)

    def hbar_part(self, power: int) -> 'Poly':
        """Coefficient of hbar^power, as a polynomial without hbar."""
        return Poly._raw(self._system, {(m, 0, im): v for (m, k, im), v in self._terms.items()
                                        if k == power}, self._order)

    def hbar_powers(self) -> List[int]:
        return sorted({k for (_, k, _) in self._terms})

    def scalar_parts(self) -> Dict[Tuple[int, int], 'Poly']:
        """Split into purely rational polynomials per (hbar power, imag flag)."""
        parts: Dict[Tuple[int, int], Dict[TermKey, Fraction]] = {}
        for (m, k, im), v in self._terms.items():
            parts.setdefault((k, im), {})[(m, 0, 0)] = v
        return {key: Poly._raw(self._system, terms, self._order) for key, terms in sorted(parts.items())}

    def coefficient(self, exponents: Mapping[str, int]) -> Scalar:
        """Coefficient of a monomial given by name -> exponent."""
        sign, key = Monomial.from_exponents({self._system.index(n): e for n, e in exponents.items()},
                                            self._system.odd_flags)
        if sign == 0:
            return Scalar()
        return Scalar({(k, im): v for (m, k, im), v in self._terms.items() if m == key})

    # -------------------------------------------------------------- arithmetic

    def _coerce(self, other) -> 'Poly':
        if isinstance(other, Poly):
            if other._system != self._system:
                raise GradedAlgebraError("Coordinate system mismatch")
            return other
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return Poly.constant(self._system, other)
        raise TypeError(f"Cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> 'Poly':
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        order = min_order(self._order, other._order)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, 0) + value
        if self._order == other._order:
            return Poly._raw(self._system, terms, order)
        return Poly(self._system, terms, order)

    __radd__ = __add__

    def __neg__(self) -> 'Poly':
        return Poly._raw(self._system, {k: -v for k, v in self._terms.items()}, self._order)

    def __sub__(self, other) -> 'Poly':
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> 'Poly':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'Poly':
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            factor = as_fraction(other)
            return Poly._raw(self._system, {k: v * factor for k, v in self._terms.items()}, self._order)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._multiply(other)

    def __rmul__(self, other) -> 'Poly':
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * other
        return self._coerce(other)._multiply(self)

    def _multiply(self, other: 'Poly') -> 'Poly':
        order = min_order(self._order, other._order)
        odd = self._system.odd_flags
        fiber = self._system.fiber_flags
        terms: Dict[TermKey, Fraction] = {}
        right = list(other._terms.items())
        if order is not None:
            right_w = [Monomial.weight(k[0], fiber) for k, _ in right]
        for (ma, ka, ia), va in self._terms.items():
            wa = Monomial.weight(ma, fiber) if order is not None else 0
            for pos, ((mb, kb, ib), vb) in enumerate(right):
                if order is not None and wa + right_w[pos] > order:
                    continue
                sign, mono = Monomial.multiply(ma, mb, odd)
                if not sign:
                    continue
                imag = ia + ib
                if imag == 2:
                    sign = -sign
                    imag = 0
                key = (mono, ka + kb, imag)
                terms[key] = terms.get(key, 0) + sign * va * vb
        return Poly._raw(self._system, terms, order)

    def __truediv__(self, other) -> 'Poly':
        return self * (Fraction(1) / as_fraction(other))

    def __pow__(self, exponent: int) -> 'Poly':
        if not isinstance(exponent, int) or exponent < 0:
            raise GradedAlgebraError("Only non-negative integer powers are supported")
        result = Poly.constant(self._system, 1, self._order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def scale(self, scalar: Coefficient) -> 'Poly':
        """Multiply by a Scalar, int or Fraction."""
        if isinstance(scalar, Scalar):
            return Poly.from_scalar(self._system, scalar, self._order) * self
        return self * scalar

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            other = Poly.constant(self._system, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._system == other._system and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._system, frozenset(self._terms.items())))

    # ------------------------------------------------------------ derivatives

    def derive(self, name: str) -> 'Poly':
        """Left graded derivative by a coordinate."""
        index = self._system.index(name)
        odd = self._system.odd_flags
        terms: Dict[TermKey, Fraction] = {}
        for (mono, k, im), value in self._terms.items():
            factor, rest = Monomial.derive(mono, index, odd)
            if factor:
                key = (rest, k, im)
                terms[key] = terms.get(key, 0) + factor * value
        return Poly._raw(self._system, terms, self._order)

    def right_derive(self, name: str) -> 'Poly':
        """Right graded derivative: (-1)^{|c|(|m|+1)} times the left one, per monomial."""
        index = self._system.index(name)
        odd = self._system.odd_flags
        c_odd = odd[index]
        terms: Dict[TermKey, Fraction] = {}
        for (mono, k, im), value in self._terms.items():
            factor, rest = Monomial.derive(mono, index, odd)
            if factor:
                if c_odd and Monomial.parity(mono, odd) == 0:
                    factor = -factor
                key = (rest, k, im)
                terms[key] = terms.get(key, 0) + factor * value
        return Poly._raw(self._system, terms, self._order)

    # ---------------------------------------------------------- system changes

    def embed(self, target: CoordinateSystem) -> 'Poly':
        """
        Re-express over a system that declares all coordinates used here.

        Monomials are re-canonicalized, so a different declaration order
        produces the matching Koszul signs.
        """
        if target == self._system:
            return self
        names = self._system.names
        remap = {i: target.index(n) for i, n in enumerate(names) if n in target}
        for (mono, _, _) in self._terms:
            for idx, _ in mono:
                if idx not in remap:
                    raise GradedAlgebraError(f"Coordinate '{names[idx]}' missing from target system")
                if target.degrees[remap[idx]] != self._system.degrees[idx]:
                    raise GradedAlgebraError(f"Coordinate '{names[idx]}' changes degree on embedding")
        return self._reindex(target, remap)

    def rename(self, mapping: Mapping[str, str], target: CoordinateSystem) -> 'Poly':
        """Rename coordinates (old -> new) into a target system."""
        names = self._system.names
        remap = {i: target.index(mapping.get(n, n)) for i, n in enumerate(names)
                 if mapping.get(n, n) in target}
        return self._reindex(target, remap)

    def _reindex(self, target: CoordinateSystem, remap: Dict[int, int]) -> 'Poly':
        odd = target.odd_flags
        terms: Dict[TermKey, Fraction] = {}
        for (mono, k, im), value in self._terms.items():
            sign, key = 1, ONE
            for idx, exp in mono:
                s, key = Monomial.multiply(key, ((remap[idx], exp),), odd)
                sign *= s
                if not sign:
                    break
            if sign:
                term = (key, k, im)
                terms[term] = terms.get(term, 0) + sign * value
        return Poly(target, terms, self._order)

    def set_zero(self, names: Iterable[str]) -> 'Poly':
        """Evaluate the given coordinates at zero."""
        indices = {self._system.index(n) for n in names}
        return Poly._raw(self._system, {k: v for k, v in self._terms.items()
                                        if Monomial.remove(k[0], indices) is not None}, self._order)

    # ------------------------------------------------------------- rendering

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self._system.names
        pieces = []
        for (mono, k, im), value in self.items():
            factors = []
            if im:
                factors.append("I")
            if k == 1:
                factors.append("hbar")
            elif k:
                factors.append(f"hbar^{k}")
            for idx, exp in mono:
                factors.append(names[idx] if exp == 1 else f"{names[idx]}^{exp}")
            magnitude = abs(value)
            body = "*".join(factors)
            if not body:
                text = format_fraction(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{format_fraction(magnitude)}*{body}"
            pieces.append(("-" if value < 0 else "+", text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Poly({self})"

    def leading_terms(self, limit: int) -> List[str]:
        """Render the first terms in canonical order, one string each."""
        result = []
        for key, value in self.items():
            if len(result) >= limit:
                break
            result.append(str(Poly._raw(self._system, {key: value}, None)))
        return result

    def to_dict(self) -> dict:
        """Convert to a dictionary."""
        names = self._system.names
        return {
            'order': self._order,
            'terms': [
                {
                    'monomial': {names[idx]: exp for idx, exp in mono},
                    'hbar': k,
                    'imag': im,
                    'coefficient': format_fraction(value),
                }
                for (mono, k, im), value in self.items()
            ],
        }
