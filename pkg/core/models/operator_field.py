"""
Operator-valued polynomials: sums of graded monomials times complex
matrices acting on a fixed finite-dimensional space.

Matrices are even, so products only carry the Koszul sign of the
monomials. Scalar coefficients with hbar and i are evaluated at the
field's numeric hbar when they enter.
"""

from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from ..config import DEFAULT_SETTINGS
from ..errors import GradedAlgebraError, ValidationError
from .derivation import Derivation
from .graded_coordinate import CoordinateSystem
from .monomial import ONE, Monomial, MonomialKey
from .poly import Poly, min_order
from .scalar import Scalar


class OperatorField:
    """
    An immutable element of (polynomials) tensor End(C^dimension).

    Usage:
        theta = OperatorField.linear(system, {"p1": rho1, "p2": rho2}, hbar=0.5)
        (theta * theta).max_abs()
    """

    __slots__ = ('_system', '_dimension', '_terms', '_hbar', '_order')

    def __init__(self, system: CoordinateSystem, dimension: int,
                 terms: Optional[Mapping[MonomialKey, np.ndarray]] = None,
                 hbar: float = 1.0, order: Optional[int] = None):
        """
        Args:
            system: Coordinate system of the monomials
            dimension: Matrix size
            terms: Canonical monomial key -> dimension x dimension matrix
            hbar: Numeric value used for hbar in polynomial coefficients
            order: Optional fiber truncation order

        Raises:
            ValidationError: On a matrix of the wrong shape
        """
        if dimension < 1:
            raise ValidationError("Operator dimension must be positive")
        clean: Dict[MonomialKey, np.ndarray] = {}
        fiber = system.fiber_flags
        for key, matrix in (terms or {}).items():
            matrix = np.asarray(matrix, dtype=complex)
            if matrix.shape != (dimension, dimension):
                raise ValidationError(f"Matrix of shape {matrix.shape}, expected {(dimension, dimension)}")
            if order is not None and Monomial.weight(key, fiber) > order:
                continue
            if np.any(matrix):
                clean[key] = matrix
        self._system = system
        self._dimension = dimension
        self._terms = clean
        self._hbar = float(hbar)
        self._order = order

    # ------------------------------------------------------------ builders

    @classmethod
    def zero(cls, system: CoordinateSystem, dimension: int, hbar: float = 1.0,
             order: Optional[int] = None) -> 'OperatorField':
        return cls(system, dimension, {}, hbar, order)

    @classmethod
    def from_poly(cls, poly: Poly, dimension: int, hbar: float = 1.0) -> 'OperatorField':
        """poly tensor identity, with hbar and i evaluated."""
        identity = np.eye(dimension, dtype=complex)
        terms: Dict[MonomialKey, np.ndarray] = {}
        for (mono, k, im), value in poly.items():
            scalar = Scalar({(k, im): value}).evaluate(hbar)
            terms[mono] = terms[mono] + scalar * identity if mono in terms else scalar * identity
        return cls(poly.system, dimension, terms, hbar, poly.order)

    @classmethod
    def linear(cls, system: CoordinateSystem, matrices: Mapping[str, np.ndarray], hbar: float = 1.0,
               order: Optional[int] = None) -> 'OperatorField':
        """sum_mu x^mu tensor M_mu."""
        if not matrices:
            raise ValidationError("linear() needs at least one matrix")
        dimension = np.asarray(next(iter(matrices.values()))).shape[0]
        terms = {((system.index(name), 1),): np.asarray(m, dtype=complex) for name, m in matrices.items()}
        return cls(system, dimension, terms, hbar, order)

    @classmethod
    def from_terms(cls, system: CoordinateSystem, terms: Iterable[Tuple[Poly, np.ndarray]],
                   hbar: float = 1.0) -> 'OperatorField':
        """sum of poly_r tensor M_r."""
        result: Optional[OperatorField] = None
        for poly, matrix in terms:
            matrix = np.asarray(matrix, dtype=complex)
            piece = cls.from_poly(poly.embed(system) if poly.system != system else poly,
                                  matrix.shape[0], hbar).right_multiply_matrix(matrix)
            result = piece if result is None else result + piece
        if result is None:
            raise ValidationError("from_terms() needs at least one term")
        return result

    # ---------------------------------------------------------- properties

    @property
    def system(self) -> CoordinateSystem:
        return self._system

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def hbar(self) -> float:
        return self._hbar

    @property
    def order(self) -> Optional[int]:
        return self._order

    @property
    def terms(self) -> Dict[MonomialKey, np.ndarray]:
        return {k: m.copy() for k, m in self._terms.items()}

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        """Largest absolute matrix entry over all terms."""
        return max((float(np.max(np.abs(m))) for m in self._terms.values()), default=0.0)

    # ----------------------------------------------------------- algebra

    def _compatible(self, other: 'OperatorField') -> None:
        if other._system != self._system:
            raise GradedAlgebraError("Coordinate system mismatch")
        if other._dimension != self._dimension:
            raise ValidationError(f"Operator dimensions differ: {self._dimension} vs {other._dimension}")

    def _new(self, terms: Mapping[MonomialKey, np.ndarray], order: Optional[int]) -> 'OperatorField':
        return OperatorField(self._system, self._dimension, terms, self._hbar, order)

    def __add__(self, other: 'OperatorField') -> 'OperatorField':
        self._compatible(other)
        terms = dict(self._terms)
        for key, m in other._terms.items():
            terms[key] = terms[key] + m if key in terms else m
        return self._new(terms, min_order(self._order, other._order))

    def __neg__(self) -> 'OperatorField':
        return self._new({k: -m for k, m in self._terms.items()}, self._order)

    def __sub__(self, other: 'OperatorField') -> 'OperatorField':
        return self + (-other)

    def scale(self, factor: complex) -> 'OperatorField':
        return self._new({k: m * factor for k, m in self._terms.items()}, self._order)

    def right_multiply_matrix(self, matrix: np.ndarray) -> 'OperatorField':
        return self._new({k: m @ matrix for k, m in self._terms.items()}, self._order)

    def __mul__(self, other: 'OperatorField') -> 'OperatorField':
        self._compatible(other)
        odd = self._system.odd_flags
        terms: Dict[MonomialKey, np.ndarray] = {}
        for a, ma in self._terms.items():
            for b, mb in other._terms.items():
                sign, key = Monomial.multiply(a, b, odd)
                if sign == 0:
                    continue
                product = (ma @ mb) * sign
                terms[key] = terms[key] + product if key in terms else product
        return self._new(terms, min_order(self._order, other._order))

    def left_multiply_poly(self, poly: Poly) -> 'OperatorField':
        """poly * self, with poly evaluated at this field's hbar."""
        if poly.system != self._system:
            poly = poly.embed(self._system)
        return OperatorField.from_poly(poly, self._dimension, self._hbar) * self

    def apply_derivation(self, field: Derivation) -> 'OperatorField':
        """X acting on the polynomial factor of every term."""
        if field.system != self._system:
            field = field.embed(self._system)
        result = OperatorField.zero(self._system, self._dimension, self._hbar, self._order)
        for key, matrix in self._terms.items():
            image = field.apply(Poly(self._system, {(key, 0, 0): 1}))
            if image.is_zero():
                continue
            result = result + OperatorField.from_poly(image, self._dimension, self._hbar).right_multiply_matrix(matrix)
        return result

    def derive(self, name: str) -> 'OperatorField':
        """Left derivative in one coordinate."""
        idx = self._system.index(name)
        odd = self._system.odd_flags
        terms: Dict[MonomialKey, np.ndarray] = {}
        for key, matrix in self._terms.items():
            sign, reduced = Monomial.derive(key, idx, odd)
            if sign:
                terms[reduced] = terms[reduced] + matrix * sign if reduced in terms else matrix * sign
        return self._new(terms, self._order)

    def form_part(self, names: Iterable[str], degree: int) -> 'OperatorField':
        """Terms of total exponent `degree` in the given coordinates."""
        indices = {self._system.index(n) for n in names}
        return self._new({k: m for k, m in self._terms.items()
                          if sum(e for i, e in k if i in indices) == degree}, self._order)

    def truncate(self, order: Optional[int]) -> 'OperatorField':
        return self._new(self._terms, min_order(self._order, order))

    # -------------------------------------------------------- numerics

    def evaluate(self, values: Mapping[str, complex]) -> np.ndarray:
        """
        Matrix value at a point; coordinates missing from values count as 0.

        Raises:
            GradedAlgebraError: If an odd coordinate is given a value
        """
        names = self._system.names
        odd = self._system.odd_flags
        for name, value in values.items():
            if odd[self._system.index(name)] and value:
                raise GradedAlgebraError(f"Odd coordinate '{name}' cannot take a numeric value")
        total = np.zeros((self._dimension, self._dimension), dtype=complex)
        for key, matrix in self._terms.items():
            factor = 1 + 0j
            for idx, exp in key:
                factor *= complex(values.get(names[idx], 0)) ** exp
                if factor == 0:
                    break
            if factor:
                total += factor * matrix
        return total

    def constant_matrix(self) -> np.ndarray:
        return self._terms.get(ONE, np.zeros((self._dimension, self._dimension), dtype=complex)).copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorField):
            return NotImplemented
        if other._system != self._system or other._dimension != self._dimension:
            return False
        return (self - other).is_zero(DEFAULT_SETTINGS.abs_tol)

    __hash__ = None

    def __repr__(self) -> str:
        return f"OperatorField(dim={self._dimension}, terms={len(self._terms)}, hbar={self._hbar})"

    def to_dict(self) -> dict:
        names = self._system.names
        terms = {}
        for key in sorted(self._terms):
            matrix = self._terms[key]
            label = "*".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in key) or "1"
            terms[label] = {'re': matrix.real.tolist(), 'im': matrix.imag.tolist()}
        return {'dimension': self._dimension, 'hbar': self._hbar, 'terms': terms}
