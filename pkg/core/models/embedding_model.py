"""
Restriction morphisms between source models, standing in for the pullback
of forms along an embedded submanifold.
"""

from fractions import Fraction
from typing import Dict, Mapping

from ..errors import ValidationError
from .source_model import SourceModel, Vector


class EmbeddingModel:
    """
    A cdga morphism i*: ambient -> submanifold, given on the ambient basis.

    Usage:
        emb = EmbeddingModel.torus_slice(3, 1)   # circle inside the 3-torus
        emb.restrict(a)                          # {b: coeff} on the circle model
    """

    def __init__(self, ambient: SourceModel, submanifold: SourceModel,
                 restriction: Mapping[int, Mapping[int, object]]):
        """
        Raises:
            ValidationError: If the map is not a degree-0 cdga morphism or the
                submanifold is larger than the ambient manifold
        """
        if submanifold.dimension > ambient.dimension:
            raise ValidationError("Submanifold dimension exceeds ambient dimension")
        self._ambient = ambient
        self._sub = submanifold
        self._map: Dict[int, Vector] = {}
        for a in range(len(ambient)):
            image = restriction.get(a, {})
            self._map[a] = {b: Fraction(v) for b, v in image.items() if Fraction(v)}
        self._validate()

    def _validate(self) -> None:
        amb, sub = self._ambient, self._sub
        if self._map[0] != {0: Fraction(1)}:
            raise ValidationError("Restriction must send the unit to the unit")
        for a in range(len(amb)):
            for b in self._map[a]:
                if sub.degrees[b] != amb.degrees[a]:
                    raise ValidationError(f"Restriction of {amb.labels[a]} changes degree")
            if self.restrict(amb.differential_of(a)) != sub.apply_differential(self._map[a]):
                raise ValidationError(f"Restriction does not commute with d on {amb.labels[a]}")
            for b in range(len(amb)):
                if self.restrict(amb.multiply_basis(a, b)) != sub.multiply(self._map[a], self._map[b]):
                    raise ValidationError(
                        f"Restriction is not multiplicative on {amb.labels[a]}, {amb.labels[b]}")

    @classmethod
    def torus_slice(cls, ambient_dim: int, sub_dim: int) -> 'EmbeddingModel':
        """
        The coordinate subtorus T^k in T^d: th_i -> th_i for i <= k, else 0.
        A sub-dimension of 0 gives a point.
        """
        ambient = SourceModel.torus(ambient_dim)
        sub = SourceModel.point() if sub_dim == 0 else (
            SourceModel.circle() if sub_dim == 1 else SourceModel.torus(sub_dim))
        sub_index = {label: i for i, label in enumerate(sub.labels)}
        restriction = {}
        for a, label in enumerate(ambient.labels):
            if label in sub_index:
                restriction[a] = {sub_index[label]: 1}
        return cls(ambient, sub, restriction)

    @property
    def ambient(self) -> SourceModel:
        return self._ambient

    @property
    def submanifold(self) -> SourceModel:
        return self._sub

    @property
    def codimension(self) -> int:
        return self._ambient.dimension - self._sub.dimension

    def image(self, a: int) -> Vector:
        return dict(self._map[a])

    def restrict(self, u: Vector) -> Vector:
        out: Dict[int, Fraction] = {}
        for a, c in u.items():
            for b, v in self._map[a].items():
                out[b] = out.get(b, Fraction(0)) + c * v
        return {k: v for k, v in out.items() if v}

    def __repr__(self) -> str:
        return f"EmbeddingModel({self._sub.name} -> {self._ambient.name})"

    def to_dict(self) -> dict:
        return {
            'ambient': self._ambient.name,
            'submanifold': self._sub.name,
            'restriction': {self._ambient.labels[a]: {self._sub.labels[b]: str(v) for b, v in img.items()}
                            for a, img in self._map.items() if img},
        }
