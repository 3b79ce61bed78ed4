"""
Constant graded symplectic structures and the BV Laplacian.

The structure is stored through its Poisson bivector w^{mu nu}: a Darboux
pair (a, b) means w^{ab} = 1, i.e. {a, b} = 1. Graded antisymmetry
w^{mu nu} = -(-1)^{|mu||nu|} w^{nu mu} is enforced; coordinates that appear
in no entry are spectators and are ignored by invertibility checks.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import sympy

from ..errors import GradedAlgebraError, ValidationError
from .graded_coordinate import CoordinateSystem
from .poly import Poly

logger = logging.getLogger(__name__)


def fraction_from_sympy(value) -> Fraction:
    """Convert a sympy Rational to Fraction."""
    value = sympy.sympify(value)
    if not value.is_Rational:
        raise ValidationError(f"Expected a rational entry, got {value}")
    return Fraction(int(value.p), int(value.q))


def invert_rational_matrix(rows: List[List[Fraction]]) -> List[List[Fraction]]:
    """
    Exact inverse of a square rational matrix.

    Raises:
        ValidationError: If the matrix is singular
    """
    if not rows:
        return []
    matrix = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows])
    if matrix.det() == 0:
        raise ValidationError("Matrix is singular")
    inverse = matrix.inv()
    return [[fraction_from_sympy(inverse[i, j]) for j in range(inverse.cols)] for i in range(inverse.rows)]


class ConstantSymplectic:
    """
    A degree-n symplectic structure with constant coefficients.

    Usage:
        omega = ConstantSymplectic.from_darboux_pairs(system, -1, [("xs", "x")])
    """

    def __init__(self, system: CoordinateSystem, degree: int, bivector: Mapping[Tuple[str, str], object]):
        """
        Initialize from bivector entries.

        Args:
            system: Coordinate system (may contain spectator coordinates)
            degree: Symplectic degree n
            bivector: Map (mu, nu) -> w^{mu nu}; the graded-antisymmetric
                partner entries are filled in when missing

        Raises:
            ValidationError: On degree violations, antisymmetry violations or
                a singular pairing
        """
        self._system = system
        self._degree = int(degree)
        self._pairs: Optional[List[Tuple[str, str]]] = None
        degrees = system.degrees
        entries: Dict[Tuple[int, int], Fraction] = {}
        for (mu, nu), value in bivector.items():
            value = Fraction(value)
            if not value:
                continue
            i, j = system.index(mu), system.index(nu)
            if degrees[i] + degrees[j] != self._degree:
                raise ValidationError(
                    f"Pairing {mu}, {nu} has degrees {degrees[i]} + {degrees[j]} != {self._degree}")
            partner = -value if (degrees[i] * degrees[j]) % 2 == 0 else value
            if (j, i) in entries and entries[(j, i)] != partner:
                raise ValidationError(f"Pairing {mu}, {nu} violates graded antisymmetry")
            if i == j and partner != value:
                raise ValidationError(f"Diagonal entry for '{mu}' violates graded antisymmetry")
            entries[(i, j)] = value
            entries[(j, i)] = partner
        self._entries = entries
        self._support = sorted({i for i, _ in entries})
        rows = [[entries.get((i, j), Fraction(0)) for j in self._support] for i in self._support]
        try:
            inverse = invert_rational_matrix(rows)
        except ValidationError:
            raise ValidationError("Symplectic pairing is degenerate on its support") from None
        self._inverse: Dict[Tuple[int, int], Fraction] = {}
        for a, i in enumerate(self._support):
            for b, j in enumerate(self._support):
                if inverse and inverse[a][b]:
                    self._inverse[(i, j)] = inverse[a][b]
        logger.debug("Constant symplectic structure of degree %d on %d coordinates",
                     self._degree, len(self._support))

    @classmethod
    def from_darboux_pairs(cls, system: CoordinateSystem, degree: int,
                           pairs: Iterable[Tuple[str, str]]) -> 'ConstantSymplectic':
        """
        Build from Darboux pairs (a, b) meaning {a, b} = 1.

        Raises:
            ValidationError: If a coordinate is paired twice
        """
        seen = set()
        bivector = {}
        for a, b in pairs:
            for name in (a, b):
                if name in seen:
                    raise ValidationError(f"Coordinate '{name}' appears in two Darboux pairs")
                seen.add(name)
            bivector[(a, b)] = 1
        structure = cls(system, degree, bivector)
        structure._pairs = [tuple(p) for p in pairs]
        return structure

    @property
    def system(self) -> CoordinateSystem:
        return self._system

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def pairs(self) -> List[Tuple[str, str]]:
        """Darboux pairs (a, b) with w^{ab} = 1 read off the bivector."""
        names = self._system.names
        if self._pairs is not None:
            return list(self._pairs)
        found = []
        for (i, j), value in sorted(self._entries.items()):
            if i < j:
                swap = value != 1 and self._entries[(j, i)] == 1
                found.append((names[j], names[i]) if swap else (names[i], names[j]))
        return found

    @property
    def support(self) -> List[str]:
        """Coordinates that carry the pairing."""
        names = self._system.names
        return [names[i] for i in self._support]

    def bivector_items(self) -> List[Tuple[str, str, Fraction]]:
        """Nonzero entries (mu, nu, w^{mu nu}) in index order."""
        names = self._system.names
        return [(names[i], names[j], v) for (i, j), v in sorted(self._entries.items())]

    def entry(self, mu: str, nu: str) -> Fraction:
        return self._entries.get((self._system.index(mu), self._system.index(nu)), Fraction(0))

    def form_entry(self, mu: str, nu: str) -> Fraction:
        """Entry of the inverse matrix (the symplectic form itself)."""
        return self._inverse.get((self._system.index(mu), self._system.index(nu)), Fraction(0))

    def form_items(self) -> List[Tuple[str, str, Fraction]]:
        names = self._system.names
        return [(names[i], names[j], v) for (i, j), v in sorted(self._inverse.items())]

    def embed(self, target: CoordinateSystem) -> 'ConstantSymplectic':
        """The same structure over a larger system."""
        return ConstantSymplectic(target, self._degree, {(a, b): v for a, b, v in self.bivector_items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConstantSymplectic):
            return NotImplemented
        return (self._system == other._system and self._degree == other._degree
                and self._entries == other._entries)

    def __hash__(self) -> int:
        return hash((self._system, self._degree, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        return f"ConstantSymplectic(degree={self._degree}, support={self.support})"

    def to_dict(self) -> dict:
        return {
            'degree': self._degree,
            'bivector': [{'mu': a, 'nu': b, 'value': str(v)} for a, b, v in self.bivector_items()],
        }


class BVLaplacian:
    """
    The BV Laplacian of a degree -1 constant symplectic structure:
    Delta f = 1/2 sum (-1)^{|mu|} w^{mu nu} d_mu d_nu f.
    """

    def __init__(self, omega: ConstantSymplectic):
        """
        Raises:
            GradedAlgebraError: If omega does not have degree -1
        """
        if omega.degree != -1:
            raise GradedAlgebraError(f"BV Laplacian needs a degree -1 structure, got {omega.degree}")
        self._omega = omega
        degrees = omega.system.degrees
        index = omega.system.index
        self._terms = [(mu, nu, value * (-1 if degrees[index(mu)] % 2 else 1) / 2)
                       for mu, nu, value in omega.bivector_items()]

    @property
    def omega(self) -> ConstantSymplectic:
        return self._omega

    @property
    def pairs(self) -> List[Tuple[str, str]]:
        return self._omega.pairs

    def apply(self, f: Poly) -> Poly:
        """
        Apply the Laplacian.

        Raises:
            GradedAlgebraError: On coordinate-system mismatch
        """
        if f.system != self._omega.system:
            raise GradedAlgebraError("Coordinate system mismatch")
        result = Poly.zero(f.system, f.order)
        variables = f.variables()
        for mu, nu, factor in self._terms:
            if mu in variables and nu in variables:
                result = result + f.derive(nu).derive(mu) * factor
        return result

    __call__ = apply

    def __repr__(self) -> str:
        return f"BVLaplacian(pairs={self.pairs})"
