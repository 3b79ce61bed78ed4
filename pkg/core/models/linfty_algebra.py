"""
L-infinity algebras in their shifted (dg manifold) form.

An L-infinity structure on a graded space with basis X_i of degree |X_i| is
stored as a cohomological vector field Q on coordinates xi^i of degree
1 - |X_i|. Bracket tables are read off Q's Taylor coefficients:

    D_j^k(i1, ..., ij) = d_i1 ... d_ij Q^k at 0
    l_j(X_i1, ..., X_ij) = (-1)^{j(j-1)/2 + 1} eps(i) D_j(i1, ..., ij)

with eps(i) = (-1)^{sum_r (j - r) |X_ir|}, the sign of moving the shifts
past the arguments.
"""

from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import multiset_permutations

from ..errors import ValidationError
from .derivation import Derivation
from .graded_coordinate import CoordinateSystem
from .poly import Poly
from .symplectic import ConstantSymplectic

BracketTable = Dict[Tuple[int, ...], Dict[int, Fraction]]


def bracket_sign(arity: int, degrees: Sequence[int], indices: Sequence[int]) -> int:
    """(-1)^{j(j-1)/2 + 1} eps(i) relating l_j to D_j."""
    exponent = arity * (arity - 1) // 2 + 1
    exponent += sum((arity - r) * degrees[i] for r, i in enumerate(indices, start=1))
    return -1 if exponent % 2 else 1


def polynomial_degree_parts(poly: Poly) -> Dict[int, Poly]:
    """Split a polynomial by total exponent."""
    parts: Dict[int, dict] = {}
    for key, value in poly.terms.items():
        parts.setdefault(sum(e for _, e in key[0]), {})[key] = value
    return {j: Poly(poly.system, terms, poly.order) for j, terms in sorted(parts.items())}


class LinftyAlgebra:
    """
    A finite-dimensional L-infinity algebra with an optional cyclic structure.

    Usage:
        g = LinftyAlgebra(labels, degrees, Q)
        g.table(2)           # {(i, j): {k: coefficient}}
        g.bracket((0, 1))    # l_2(X_0, X_1)
    """

    def __init__(self, labels: Sequence[str], degrees: Sequence[int], field: Derivation,
                 omega: Optional[ConstantSymplectic] = None, name: str = ""):
        """
        Initialize from the shifted vector field.

        Args:
            labels: Basis labels of the unshifted space
            degrees: Degrees |X_i| of the unshifted basis
            field: Degree 1 vector field on the shifted coordinates
            omega: Optional symplectic structure on the shifted coordinates
                encoding the cyclic pairing
            name: Name of the algebra

        Raises:
            ValidationError: On size or degree mismatch, a curved field (Q(0) != 0)
                or a field of degree other than 1
        """
        system = field.system
        if len(labels) != len(system) or len(degrees) != len(system):
            raise ValidationError("Labels and degrees must match the shifted coordinates")
        for coord, degree in zip(system, degrees):
            if coord.degree != 1 - degree:
                raise ValidationError(f"Shifted coordinate '{coord.name}' must have degree {1 - degree}")
        if field.degree != 1:
            raise ValidationError(f"L-infinity vector field must have degree 1, got {field.degree}")
        for coord_name, comp in field.items():
            if not comp.constant_term().is_zero():
                raise ValidationError(f"Curved component on '{coord_name}' is not supported")
        if omega is not None and omega.system != system:
            raise ValidationError("Cyclic structure lives on another coordinate system")
        self._labels = list(labels)
        self._degrees = [int(d) for d in degrees]
        self._field = field
        self._omega = omega
        self._name = name
        self._tables: Dict[int, BracketTable] = {}

    @staticmethod
    def shifted_name(label: str) -> str:
        return f"xi_{label}"

    @property
    def name(self) -> str:
        return self._name

    @property
    def labels(self) -> List[str]:
        return list(self._labels)

    @property
    def degrees(self) -> List[int]:
        return list(self._degrees)

    @property
    def dimension(self) -> int:
        return len(self._labels)

    @property
    def system(self) -> CoordinateSystem:
        """The shifted coordinates."""
        return self._field.system

    @property
    def field(self) -> Derivation:
        return self._field

    @property
    def omega(self) -> Optional[ConstantSymplectic]:
        return self._omega

    @property
    def is_cyclic(self) -> bool:
        return self._omega is not None

    def with_omega(self, omega: ConstantSymplectic) -> 'LinftyAlgebra':
        return LinftyAlgebra(self._labels, self._degrees, self._field, omega, self._name)

    def arities(self) -> List[int]:
        """Arities with a nonzero bracket."""
        found = set()
        for _, comp in self._field.items():
            found.update(polynomial_degree_parts(comp))
        return sorted(found)

    def table(self, arity: int) -> BracketTable:
        """The bracket l_arity on every ordered index tuple where it is nonzero."""
        if arity not in self._tables:
            names = self.system.names
            table: BracketTable = {}
            for k, name in enumerate(names):
                part = polynomial_degree_parts(self._field.component(name)).get(arity)
                if part is None:
                    continue
                multisets = set()
                for (mono, _, _) in part.terms:
                    multisets.add(tuple(idx for idx, exp in mono for _ in range(exp)))
                for multiset in sorted(multisets):
                    for perm in multiset_permutations(list(multiset)):
                        value = part
                        for idx in reversed(perm):
                            value = value.derive(names[idx])
                        coeff = value.constant_term().rational()
                        if coeff:
                            sign = bracket_sign(arity, self._degrees, perm)
                            table.setdefault(tuple(perm), {})[k] = coeff * sign
            self._tables[arity] = table
        return self._tables[arity]

    def bracket(self, indices: Sequence[int]) -> Dict[int, Fraction]:
        """l_j(X_i1, ..., X_ij) as a coefficient vector."""
        return dict(self.table(len(indices)).get(tuple(indices), {}))

    def reconstruct_field(self) -> Derivation:
        """
        Rebuild Q from the bracket tables:
        Q^k = sum_j 1/j! sum_i xi^ij ... xi^i1 D_j^k(i1, ..., ij).
        """
        system = self.system
        names = system.names
        comps: Dict[str, Poly] = {}
        for arity in self.arities():
            weight = Fraction(1, factorial(arity))
            for indices, vector in self.table(arity).items():
                mono = Poly.constant(system, 1)
                for idx in reversed(indices):
                    mono = mono * Poly.coordinate(system, names[idx])
                sign = bracket_sign(arity, self._degrees, indices)
                for k, value in vector.items():
                    term = mono * (value * sign * weight)
                    comps[names[k]] = comps[names[k]] + term if names[k] in comps else term
        return Derivation(system, 1, comps)

    def pairing(self, i: int, j: int) -> Fraction:
        """<X_i, X_j> = (-1)^{|X_i|} w_{xi_i xi_j} (zero without a cyclic structure)."""
        if self._omega is None:
            return Fraction(0)
        names = self.system.names
        value = self._omega.form_entry(names[i], names[j])
        return -value if self._degrees[i] % 2 else value

    def __repr__(self) -> str:
        return f"LinftyAlgebra({self._name or self.dimension}, arities={self.arities()})"

    def to_dict(self) -> dict:
        brackets = {}
        for arity in self.arities():
            brackets[str(arity)] = [
                {'inputs': [self._labels[i] for i in indices],
                 'output': {self._labels[k]: str(v) for k, v in sorted(vector.items())}}
                for indices, vector in sorted(self.table(arity).items())
            ]
        return {
            'name': self._name,
            'basis': [{'label': label, 'degree': degree} for label, degree in zip(self._labels, self._degrees)],
            'brackets': brackets,
            'cyclic': self.is_cyclic,
        }
