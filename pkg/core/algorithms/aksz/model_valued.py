"""
Elements of (source model) tensor (polynomial algebra).

An element is sum_a e_a f_a with the basis element written on the left.
Products carry the Koszul sign of moving e_b past f:

    (e_a f)(e_b g) = (-1)^{|f||e_b|} m_ab^c e_c f g
"""

from typing import Dict, Mapping, Optional

from ...errors import GradedAlgebraError
from ...models.graded_coordinate import CoordinateSystem
from ...models.monomial import Monomial
from ...models.poly import Poly
from ...models.source_model import SourceModel


def parity_parts(f: Poly) -> Dict[int, Poly]:
    """Split a polynomial into its even and odd monomials."""
    odd = f.system.odd_flags
    parts: Dict[int, dict] = {0: {}, 1: {}}
    for key, value in f.terms.items():
        parts[Monomial.parity(key[0], odd)][key] = value
    return {p: Poly(f.system, terms, f.order) for p, terms in parts.items() if terms}


class ModelValued:
    """
    An immutable model-valued polynomial.

    Usage:
        A = ModelValued.superfield(model, system, {0: "x_1", 1: "x_th1"})
        (A * A).integrate()
    """

    __slots__ = ('_model', '_system', '_parts')

    def __init__(self, model: SourceModel, system: CoordinateSystem, parts: Optional[Mapping[int, Poly]] = None):
        self._model = model
        self._system = system
        self._parts: Dict[int, Poly] = {a: p for a, p in (parts or {}).items() if not p.is_zero()}

    @classmethod
    def constant(cls, model: SourceModel, poly: Poly) -> 'ModelValued':
        """The polynomial times the unit."""
        return cls(model, poly.system, {0: poly})

    @classmethod
    def superfield(cls, model: SourceModel, system: CoordinateSystem,
                   fields: Mapping[int, str], order: Optional[int] = None) -> 'ModelValued':
        """sum_a e_a A_a for component field names A_a."""
        return cls(model, system, {a: Poly.coordinate(system, name, order) for a, name in fields.items()})

    @property
    def model(self) -> SourceModel:
        return self._model

    @property
    def system(self) -> CoordinateSystem:
        return self._system

    @property
    def parts(self) -> Dict[int, Poly]:
        return dict(self._parts)

    def part(self, a: int) -> Poly:
        return self._parts.get(a, Poly.zero(self._system))

    def is_zero(self) -> bool:
        return not self._parts

    def __add__(self, other: 'ModelValued') -> 'ModelValued':
        parts = dict(self._parts)
        for a, p in other._parts.items():
            parts[a] = parts[a] + p if a in parts else p
        return ModelValued(self._model, self._system, parts)

    def __neg__(self) -> 'ModelValued':
        return ModelValued(self._model, self._system, {a: -p for a, p in self._parts.items()})

    def __sub__(self, other: 'ModelValued') -> 'ModelValued':
        return self + (-other)

    def scale(self, factor) -> 'ModelValued':
        """Multiply by a number (or an even-degree-free Scalar) on the right."""
        return ModelValued(self._model, self._system, {a: p.scale(factor) for a, p in self._parts.items()})

    def __mul__(self, other: 'ModelValued') -> 'ModelValued':
        if other._system != self._system:
            raise GradedAlgebraError("Coordinate system mismatch")
        degrees = self._model.degrees
        parts: Dict[int, Poly] = {}
        left = {a: parity_parts(f) for a, f in self._parts.items()}
        for a, f_parts in left.items():
            for b, g in other._parts.items():
                table = self._model.multiply_basis(a, b)
                if not table:
                    continue
                for parity, f in f_parts.items():
                    sign = -1 if parity and degrees[b] % 2 else 1
                    fg = f * g
                    if fg.is_zero():
                        continue
                    for c, m in table.items():
                        term = fg * (m * sign)
                        parts[c] = parts[c] + term if c in parts else term
        return ModelValued(self._model, self._system, parts)

    def left_multiply_poly(self, poly: Poly) -> 'ModelValued':
        """poly * (sum e_a f_a) = sum e_a (-1)^{|poly||e_a|} poly f_a."""
        degrees = self._model.degrees
        poly_parts = parity_parts(poly)
        parts: Dict[int, Poly] = {}
        for a, f in self._parts.items():
            for parity, piece in poly_parts.items():
                sign = -1 if parity and degrees[a] % 2 else 1
                term = piece * f * sign
                parts[a] = parts[a] + term if a in parts else term
        return ModelValued(self._model, self._system, parts)

    def integrate(self) -> Poly:
        """int (e_a f_a) = I_a f_a."""
        total = Poly.zero(self._system)
        for a, f in self._parts.items():
            weight = self._model.integral_of(a)
            if weight:
                total = total + f * weight
        return total

    def differential(self) -> 'ModelValued':
        """d acting on the model factor: d(e_a f) = (d e_a) f."""
        parts: Dict[int, Poly] = {}
        for a, f in self._parts.items():
            for b, coeff in self._model.differential_of(a).items():
                term = f * coeff
                parts[b] = parts[b] + term if b in parts else term
        return ModelValued(self._model, self._system, parts)

    def apply_derivation(self, field) -> 'ModelValued':
        """(1 tensor X)(e_a f) = (-1)^{|X||e_a|} e_a X(f)."""
        degrees = self._model.degrees
        parts = {}
        for a, f in self._parts.items():
            sign = -1 if field.degree % 2 and degrees[a] % 2 else 1
            parts[a] = field.apply(f) * sign
        return ModelValued(self._model, self._system, parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelValued):
            return NotImplemented
        return self._system == other._system and self._parts == other._parts

    def __hash__(self) -> int:
        return hash((self._system, frozenset(self._parts)))

    def __repr__(self) -> str:
        labels = self._model.labels
        return " + ".join(f"{labels[a]}*({p})" for a, p in sorted(self._parts.items())) or "0"

    @staticmethod
    def evaluate(theta: Poly, superfields: Mapping[str, 'ModelValued'], model: SourceModel,
                 system: CoordinateSystem, constants: Optional[Mapping[str, Poly]] = None) -> 'ModelValued':
        """
        Evaluate a target polynomial on superfields.

        Args:
            theta: Polynomial over the target system
            superfields: Target coordinate -> model-valued superfield
            model: Source model
            system: Field system of the result
            constants: Target coordinates to replace by plain polynomials
                (placed in the unit component)

        Raises:
            GradedAlgebraError: If a coordinate of theta has no image
        """
        names = theta.system.names
        images: Dict[int, ModelValued] = {}
        for idx, name in enumerate(names):
            if name in superfields:
                images[idx] = superfields[name]
            elif constants and name in constants:
                images[idx] = ModelValued.constant(model, constants[name])
        powers: Dict[tuple, ModelValued] = {}

        def power(idx: int, exp: int) -> ModelValued:
            if (idx, exp) not in powers:
                powers[(idx, exp)] = images[idx] if exp == 1 else power(idx, exp - 1) * images[idx]
            return powers[(idx, exp)]

        result = ModelValued(model, system)
        for (mono, k, im), value in theta.items():
            term = ModelValued.constant(model, Poly(system, {((), k, im): value}))
            for idx, exp in mono:
                if idx not in images:
                    raise GradedAlgebraError(f"No superfield for target coordinate '{names[idx]}'")
                term = term * power(idx, exp)
                if term.is_zero():
                    break
            result = result + term
        return result
