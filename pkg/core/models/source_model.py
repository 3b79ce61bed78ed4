"""
Finite commutative differential graded algebras with an integration
functional, standing in for differential forms on a closed d-manifold.

Basis element 0 is the unit. Products, the differential and the integral
are given on the basis:

    e_a e_b = sum_c m_ab^c e_c
    d e_a   = sum_b D_a^b e_b
    int e_a = I_a   (nonzero only in degree d)
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..errors import ValidationError
from .symplectic import invert_rational_matrix

logger = logging.getLogger(__name__)

Vector = Dict[int, Fraction]


def _clean(vector: Mapping[int, object]) -> Vector:
    return {k: Fraction(v) for k, v in vector.items() if Fraction(v)}


def _add(a: Vector, b: Vector, scale: Fraction = Fraction(1)) -> Vector:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + scale * v
    return {k: v for k, v in out.items() if v}


class SourceModel:
    """
    A finite cdga with integration.

    Usage:
        model = SourceModel.torus(2)
        model.multiply_basis(1, 2)   # {3: 1}
    """

    def __init__(self, name: str, dimension: int, labels: Sequence[str], degrees: Sequence[int],
                 products: Mapping[Tuple[int, int], Mapping[int, object]],
                 differential: Optional[Mapping[int, Mapping[int, object]]] = None,
                 integral: Optional[Mapping[int, object]] = None):
        """
        Initialize and validate a source model.

        Args:
            name: Model name
            dimension: Dimension d of the modelled manifold
            labels: Basis labels (label 0 is the unit)
            degrees: Form degree of each basis element
            products: Map (a, b) -> {c: m_ab^c}; products with the unit may be omitted
            differential: Map a -> {b: D_a^b}
            integral: Map a -> I_a

        Raises:
            ValidationError: If any cdga or integration invariant fails
        """
        if len(labels) != len(degrees) or not labels:
            raise ValidationError("Source model needs one degree per basis label")
        if len(set(labels)) != len(labels):
            raise ValidationError("Duplicate basis labels in source model")
        if degrees[0] != 0:
            raise ValidationError("Basis element 0 must be the degree-0 unit")
        self._name = name
        self._dimension = int(dimension)
        self._labels = list(labels)
        self._degrees = [int(d) for d in degrees]
        n = len(labels)
        table: Dict[Tuple[int, int], Vector] = {}
        for a in range(n):
            table[(0, a)] = {a: Fraction(1)}
            table[(a, 0)] = {a: Fraction(1)}
        for (a, b), out in products.items():
            vec = _clean(out)
            if (a == 0 or b == 0) and vec != table[(a, b)]:
                raise ValidationError("Basis element 0 must act as the unit")
            table[(a, b)] = vec
        self._products = table
        self._differential = {a: _clean(v) for a, v in (differential or {}).items()}
        self._integral = {a: Fraction(v) for a, v in (integral or {}).items() if Fraction(v)}
        self._validate()
        self._pairing: Optional[List[List[Fraction]]] = None

    # ----------------------------------------------------------- validation

    def _validate(self) -> None:
        n = len(self._labels)
        deg = self._degrees
        for (a, b), vec in self._products.items():
            for c in vec:
                if deg[c] != deg[a] + deg[b]:
                    raise ValidationError(
                        f"Product {self._labels[a]}*{self._labels[b]} has wrong degree component {self._labels[c]}")
        for a, vec in self._differential.items():
            for b in vec:
                if deg[b] != deg[a] + 1:
                    raise ValidationError(f"Differential of {self._labels[a]} is not of degree +1")
        for a in self._integral:
            if deg[a] != self._dimension:
                raise ValidationError(f"Integral is nonzero on {self._labels[a]} of degree {deg[a]}")
        for a in range(n):
            for b in range(n):
                sign = -1 if deg[a] * deg[b] % 2 else 1
                if self.multiply_basis(a, b) != {c: sign * v for c, v in self.multiply_basis(b, a).items()}:
                    raise ValidationError(
                        f"Product is not graded commutative on {self._labels[a]}, {self._labels[b]}")
                for c in range(n):
                    left = self.multiply(self.multiply_basis(a, b), {c: Fraction(1)})
                    right = self.multiply({a: Fraction(1)}, self.multiply_basis(b, c))
                    if left != right:
                        raise ValidationError(
                            f"Product is not associative on {self._labels[a]}, {self._labels[b]}, {self._labels[c]}")
        for a in range(n):
            if self.apply_differential(self.apply_differential({a: Fraction(1)})):
                raise ValidationError(f"Differential does not square to zero on {self._labels[a]}")
            if self.integrate(self.apply_differential({a: Fraction(1)})):
                raise ValidationError(f"Integral of d({self._labels[a]}) is nonzero")
            for b in range(n):
                lhs = self.apply_differential(self.multiply_basis(a, b))
                sign = Fraction(-1 if deg[a] % 2 else 1)
                rhs = _add(self.multiply(self.apply_differential({a: Fraction(1)}), {b: Fraction(1)}),
                           self.multiply({a: Fraction(1)}, self.apply_differential({b: Fraction(1)})), sign)
                if lhs != rhs:
                    raise ValidationError(
                        f"Differential violates Leibniz on {self._labels[a]}, {self._labels[b]}")
        logger.debug("Validated source model %s with %d basis elements", self._name, n)

    # --------------------------------------------------------------- builtins

    @classmethod
    def point(cls) -> 'SourceModel':
        """The model of a point: only the unit, integral 1."""
        return cls("point", 0, ["1"], [0], {}, {}, {0: 1})

    @classmethod
    def circle(cls) -> 'SourceModel':
        """Forms 1, th on the circle with int th = 1."""
        return cls.torus(1, name="circle")

    @classmethod
    def torus(cls, k: int, name: Optional[str] = None) -> 'SourceModel':
        """
        Exterior algebra on th1..thk with zero differential, int th1...thk = 1.

        Raises:
            ValidationError: If k < 1
        """
        if k < 1:
            raise ValidationError("Torus dimension must be at least 1")
        subsets: List[Tuple[int, ...]] = []
        for size in range(k + 1):
            subsets.extend(combinations(range(1, k + 1), size))
        index = {s: i for i, s in enumerate(subsets)}
        labels = ["1" if not s else "".join(f"th{i}" for i in s) for s in subsets]
        degrees = [len(s) for s in subsets]
        products: Dict[Tuple[int, int], Dict[int, int]] = {}
        for a, sa in enumerate(subsets):
            for b, sb in enumerate(subsets):
                if set(sa) & set(sb):
                    products[(a, b)] = {}
                    continue
                merged = sa + sb
                inversions = sum(1 for i in range(len(merged)) for j in range(i + 1, len(merged))
                                 if merged[i] > merged[j])
                products[(a, b)] = {index[tuple(sorted(merged))]: -1 if inversions % 2 else 1}
        top = index[tuple(range(1, k + 1))]
        return cls(name or f"torus{k}", k, labels, degrees, products, {}, {top: 1})

    @classmethod
    def sphere2(cls) -> 'SourceModel':
        """1 and v of degree 2, v^2 = 0, int v = 1."""
        return cls("sphere2", 2, ["1", "v"], [0, 2], {(1, 1): {}}, {}, {1: 1})

    @classmethod
    def sphere3(cls) -> 'SourceModel':
        """
        1, a, b, ab of degrees 0..3 with d a = b and int ab = 1.

        The cohomology is that of the 3-sphere; the differential is nonzero.
        """
        products = {
            (1, 1): {}, (1, 2): {3: 1}, (2, 1): {3: 1}, (2, 2): {},
            (1, 3): {}, (3, 1): {}, (2, 3): {}, (3, 2): {}, (3, 3): {},
        }
        return cls("sphere3", 3, ["1", "a", "b", "ab"], [0, 1, 2, 3], products, {1: {2: 1}}, {3: 1})

    @classmethod
    def builtin(cls, name: str) -> 'SourceModel':
        """
        Look up a bundled model by name (point, circle, torus1..torus4, sphere2, sphere3).

        Raises:
            ValidationError: If the name is unknown
        """
        if name == "point":
            return cls.point()
        if name == "circle":
            return cls.circle()
        if name.startswith("torus") and name[5:].isdigit():
            return cls.torus(int(name[5:]))
        if name == "sphere2":
            return cls.sphere2()
        if name == "sphere3":
            return cls.sphere3()
        raise ValidationError(f"Unknown source model '{name}'")

    # -------------------------------------------------------------- algebra

    @property
    def name(self) -> str:
        return self._name

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def labels(self) -> List[str]:
        return list(self._labels)

    @property
    def degrees(self) -> List[int]:
        return list(self._degrees)

    def __len__(self) -> int:
        return len(self._labels)

    def index(self, label: str) -> int:
        try:
            return self._labels.index(label)
        except ValueError:
            raise ValidationError(f"Unknown basis label '{label}' in model {self._name}") from None

    def multiply_basis(self, a: int, b: int) -> Vector:
        return dict(self._products.get((a, b), {}))

    def multiply(self, u: Vector, v: Vector) -> Vector:
        out: Vector = {}
        for a, ca in u.items():
            for b, cb in v.items():
                out = _add(out, self._products.get((a, b), {}), ca * cb)
        return out

    def differential_of(self, a: int) -> Vector:
        return dict(self._differential.get(a, {}))

    def apply_differential(self, u: Vector) -> Vector:
        out: Vector = {}
        for a, ca in u.items():
            out = _add(out, self._differential.get(a, {}), ca)
        return out

    def integral_of(self, a: int) -> Fraction:
        return self._integral.get(a, Fraction(0))

    def integrate(self, u: Vector) -> Fraction:
        return sum((c * self.integral_of(a) for a, c in u.items()), Fraction(0))

    def has_zero_differential(self) -> bool:
        return not any(self._differential.values())

    def pairing_matrix(self) -> List[List[Fraction]]:
        """P_ab = int e_a e_b."""
        if self._pairing is None:
            n = len(self._labels)
            self._pairing = [[self.integrate(self.multiply_basis(a, b)) for b in range(n)] for a in range(n)]
        return [row[:] for row in self._pairing]

    def inverse_pairing(self) -> List[List[Fraction]]:
        """
        The inverse Q of the Poincare pairing (Q P = 1).

        Raises:
            ValidationError: If the pairing is degenerate
        """
        try:
            return invert_rational_matrix(self.pairing_matrix())
        except ValidationError:
            raise ValidationError(f"Poincare pairing of model {self._name} is degenerate") from None

    def is_automorphism(self, matrix: Mapping[int, Mapping[int, object]]) -> bool:
        """
        Check that e_a -> sum_b g_a^b e_b preserves degrees, unit, products,
        differential and integral.
        """
        n = len(self._labels)
        g = {a: _clean(matrix.get(a, {a: 1})) for a in range(n)}

        def image(u: Vector) -> Vector:
            out: Vector = {}
            for a, c in u.items():
                out = _add(out, g[a], c)
            return out

        if g[0] != {0: Fraction(1)}:
            return False
        for a in range(n):
            if any(self._degrees[b] != self._degrees[a] for b in g[a]):
                return False
            if self.integrate(g[a]) != self.integral_of(a):
                return False
            if image(self.differential_of(a)) != self.apply_differential(g[a]):
                return False
            for b in range(n):
                if image(self.multiply_basis(a, b)) != self.multiply(g[a], g[b]):
                    return False
        return True

    def __repr__(self) -> str:
        return f"SourceModel({self._name}, d={self._dimension}, basis={self._labels})"

    def to_dict(self) -> dict:
        return {
            'name': self._name,
            'dimension': self._dimension,
            'basis': [{'label': l, 'degree': d} for l, d in zip(self._labels, self._degrees)],
            'integral': {self._labels[a]: str(v) for a, v in sorted(self._integral.items())},
        }
