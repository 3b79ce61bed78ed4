"""
Structure constants of finite-dimensional Lie algebras.

Constants are stored as f^k_ij with [e_i, e_j] = f^k_ij e_k and enforced
antisymmetry in the lower indices; the Jacobi identity is not required at
construction, so perturbed (non-Lie) brackets can be represented and
rejected later by certification.
"""

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..errors import ValidationError
from .symplectic import invert_rational_matrix

ConstantKey = Tuple[int, int, int]


class LieStructure:
    """
    Antisymmetric bracket constants on a basis of size n.

    Usage:
        g = LieStructure.sl2()
        g.bracket_vector({1: 1}, {2: 1})   # {0: 1}, i.e. [e, f] = h
    """

    def __init__(self, dimension: int, constants: Mapping[ConstantKey, object],
                 labels: Optional[Sequence[str]] = None, name: str = "",
                 invariant_form: Optional[Mapping[Tuple[int, int], object]] = None):
        """
        Initialize bracket constants.

        Args:
            dimension: Number of basis elements
            constants: Map (k, i, j) -> f^k_ij; the (k, j, i) partner is filled in
            labels: Basis labels (default 1..n)
            name: Name of the algebra
            invariant_form: Optional symmetric form (i, j) -> B_ij

        Raises:
            ValidationError: On out-of-range indices or inconsistent antisymmetry
        """
        self._n = int(dimension)
        self._labels = list(labels) if labels else [str(i + 1) for i in range(self._n)]
        self._name = name
        table: Dict[ConstantKey, Fraction] = {}
        for (k, i, j), value in constants.items():
            value = Fraction(value)
            if not all(0 <= idx < self._n for idx in (k, i, j)):
                raise ValidationError(f"Structure constant index out of range: {(k, i, j)}")
            if i == j and value:
                raise ValidationError(f"Structure constant f^{k}_{i}{i} must vanish")
            if (k, j, i) in table and table[(k, j, i)] != -value:
                raise ValidationError(f"Structure constants not antisymmetric at {(k, i, j)}")
            if value:
                table[(k, i, j)] = value
                table[(k, j, i)] = -value
        self._constants = table
        form: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), value in (invariant_form or {}).items():
            value = Fraction(value)
            if value:
                form[(i, j)] = value
                form[(j, i)] = value
        self._form = form

    # -------------------------------------------------------------- builtins

    @classmethod
    def abelian(cls, n: int) -> 'LieStructure':
        return cls(n, {}, name=f"abelian{n}", invariant_form={(i, i): 1 for i in range(n)})

    @classmethod
    def sl2(cls) -> 'LieStructure':
        """Basis (h, e, f) with [h,e] = 2e, [h,f] = -2f, [e,f] = h and the trace form."""
        return cls(3, {(1, 0, 1): 2, (2, 0, 2): -2, (0, 1, 2): 1}, ["h", "e", "f"], "sl2",
                   {(0, 0): 2, (1, 2): 1})

    @classmethod
    def so3(cls) -> 'LieStructure':
        """[e_i, e_j] = eps_ijk e_k with the identity form."""
        return cls(3, {(2, 0, 1): 1, (0, 1, 2): 1, (1, 2, 0): 1}, ["1", "2", "3"], "so3",
                   {(i, i): 1 for i in range(3)})

    @classmethod
    def builtin(cls, name: str) -> 'LieStructure':
        """
        Raises:
            ValidationError: If the name is unknown
        """
        if name == "sl2":
            return cls.sl2()
        if name == "so3":
            return cls.so3()
        if name.startswith("abelian") and name[7:].isdigit():
            return cls.abelian(int(name[7:]))
        raise ValidationError(f"Unknown Lie algebra '{name}'")

    def perturbed(self, key: ConstantKey, delta) -> 'LieStructure':
        """A copy with f^k_ij shifted by delta (antisymmetry kept)."""
        constants = {k: v for k, v in self._constants.items() if k[1] < k[2]}
        k, i, j = key
        if i > j:
            i, j, delta = j, i, -Fraction(delta)
        constants[(k, i, j)] = constants.get((k, i, j), Fraction(0)) + Fraction(delta)
        return LieStructure(self._n, constants, self._labels, self._name + "~", self.invariant_form)

    def scaled(self, factor) -> 'LieStructure':
        constants = {k: v * Fraction(factor) for k, v in self._constants.items() if k[1] < k[2]}
        return LieStructure(self._n, constants, self._labels, self._name, self.invariant_form)

    # ------------------------------------------------------------ accessors

    @property
    def dimension(self) -> int:
        return self._n

    @property
    def labels(self) -> List[str]:
        return list(self._labels)

    @property
    def name(self) -> str:
        return self._name

    @property
    def invariant_form(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self._form)

    def constant(self, k: int, i: int, j: int) -> Fraction:
        return self._constants.get((k, i, j), Fraction(0))

    def items(self) -> List[Tuple[ConstantKey, Fraction]]:
        """All nonzero f^k_ij (both orders of i, j)."""
        return sorted(self._constants.items())

    def is_abelian(self) -> bool:
        return not self._constants

    def bracket_vector(self, u: Mapping[int, object], v: Mapping[int, object]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for (k, i, j), value in self._constants.items():
            if i in u and j in v:
                out[k] = out.get(k, Fraction(0)) + value * Fraction(u[i]) * Fraction(v[j])
        return {k: c for k, c in out.items() if c}

    def jacobiator(self) -> Dict[Tuple[int, int, int, int], Fraction]:
        """Nonzero components of [[e_i,e_j],e_k] + cyclic, keyed (m, i, j, k)."""
        result: Dict[Tuple[int, int, int, int], Fraction] = {}
        n = self._n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    total: Dict[int, Fraction] = {}
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        inner = self.bracket_vector({a: 1}, {b: 1})
                        for m, val in self.bracket_vector(inner, {c: 1}).items():
                            total[m] = total.get(m, Fraction(0)) + val
                    for m, val in total.items():
                        if val:
                            result[(m, i, j, k)] = val
        return result

    def is_invariant_form(self) -> bool:
        """Check B([a,b],c) = B(a,[b,c]) for the stored form."""
        n = self._n
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    left = sum((v * self._form.get((k, c), 0) for k, v in
                                self.bracket_vector({a: 1}, {b: 1}).items()), Fraction(0))
                    right = sum((v * self._form.get((a, k), 0) for k, v in
                                 self.bracket_vector({b: 1}, {c: 1}).items()), Fraction(0))
                    if left != right:
                        return False
        return True

    def inverse_form(self) -> Dict[Tuple[int, int], Fraction]:
        """
        The bivector inverse to the invariant form.

        Raises:
            ValidationError: If there is no form or it is degenerate
        """
        if not self._form:
            raise ValidationError(f"Lie algebra {self._name} has no invariant form")
        rows = [[self._form.get((i, j), Fraction(0)) for j in range(self._n)] for i in range(self._n)]
        inverse = invert_rational_matrix(rows)
        return {(i, j): inverse[i][j] for i in range(self._n) for j in range(self._n) if inverse[i][j]}

    def __repr__(self) -> str:
        return f"LieStructure({self._name or self._n})"

    def to_dict(self) -> dict:
        return {
            'name': self._name,
            'dimension': self._n,
            'constants': [{'k': k, 'i': i, 'j': j, 'value': str(v)}
                          for (k, i, j), v in self.items() if i < j],
        }
