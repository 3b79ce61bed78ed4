"""
Exact scalars over the rationals extended by a formal central symbol hbar
(Laurent powers allowed) and the imaginary unit i with i^2 = -1.
"""

from fractions import Fraction
from typing import Dict, Iterator, Tuple, Union

Number = Union[int, Fraction]
ScalarKey = Tuple[int, int]  # (hbar power, imaginary flag)


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and rational strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"Cannot use {type(value).__name__} as an exact coefficient")


def format_fraction(value: Fraction) -> str:
    """Render a Fraction as 'p' or 'p/q'."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def multiply_keys(a: ScalarKey, b: ScalarKey) -> Tuple[int, ScalarKey]:
    """Multiply two scalar basis elements, returning (sign, key)."""
    imag = a[1] + b[1]
    sign = -1 if imag == 2 else 1
    return sign, (a[0] + b[0], imag % 2)


class Scalar:
    """
    Immutable exact scalar sum_k,j c_{k,j} hbar^k i^j.

    Usage:
        s = Scalar.hbar() * Scalar.i() * 2
        s.evaluate(0.1)   # complex value at hbar = 0.1
    """

    __slots__ = ('_terms',)

    def __init__(self, terms: Dict[ScalarKey, Number] = None):
        cleaned = {}
        for key, value in (terms or {}).items():
            value = as_fraction(value)
            if value:
                cleaned[key] = value
        self._terms: Dict[ScalarKey, Fraction] = cleaned

    @classmethod
    def of(cls, value) -> 'Scalar':
        """Coerce a number or Scalar into a Scalar."""
        if isinstance(value, Scalar):
            return value
        return cls({(0, 0): value})

    @classmethod
    def hbar(cls, power: int = 1) -> 'Scalar':
        """The scalar hbar^power."""
        return cls({(power, 0): 1})

    @classmethod
    def i(cls) -> 'Scalar':
        """The imaginary unit."""
        return cls({(0, 1): 1})

    @property
    def terms(self) -> Dict[ScalarKey, Fraction]:
        """Get a copy of the (hbar power, imag) -> coefficient map."""
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[ScalarKey, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        """Check whether the scalar has no hbar or i dependence."""
        return all(key == (0, 0) for key in self._terms)

    def rational(self) -> Fraction:
        """
        Get the value of a purely rational scalar.

        Raises:
            ValueError: If hbar or i occur
        """
        if not self.is_rational():
            raise ValueError(f"Scalar {self} is not rational")
        return self._terms.get((0, 0), Fraction(0))

    def hbar_part(self, power: int) -> 'Scalar':
        """Get the coefficient of hbar^power (still possibly imaginary)."""
        return Scalar({(0, im): c for (k, im), c in self._terms.items() if k == power})

    def __add__(self, other) -> 'Scalar':
        other = Scalar.of(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, 0) + value
        return Scalar(terms)

    __radd__ = __add__

    def __neg__(self) -> 'Scalar':
        return Scalar({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> 'Scalar':
        return self + (-Scalar.of(other))

    def __rsub__(self, other) -> 'Scalar':
        return Scalar.of(other) - self

    def __mul__(self, other) -> 'Scalar':
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                return Scalar({k: v * other for k, v in self._terms.items()})
            return NotImplemented
        terms: Dict[ScalarKey, Fraction] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                sign, key = multiply_keys(ka, kb)
                terms[key] = terms.get(key, 0) + sign * va * vb
        return Scalar(terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'Scalar':
        return self * (Fraction(1) / as_fraction(other))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def evaluate(self, hbar: float) -> complex:
        """Numeric value at a given hbar."""
        total = 0j
        for (k, im), value in self._terms.items():
            total += float(value) * (hbar ** k) * (1j if im else 1)
        return total

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (k, im), value in sorted(self._terms.items()):
            factors = []
            if im:
                factors.append("I")
            if k == 1:
                factors.append("hbar")
            elif k:
                factors.append(f"hbar^{k}")
            if not factors:
                parts.append(format_fraction(value))
            elif value == 1:
                parts.append("*".join(factors))
            elif value == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(format_fraction(value) + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def to_dict(self) -> dict:
        """Convert to a dictionary of 'hbar^k*i^j' -> rational string."""
        return {f"hbar^{k}*i^{im}": format_fraction(v) for (k, im), v in sorted(self._terms.items())}
