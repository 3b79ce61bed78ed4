"""
The connection 1-form R = dx^l R_l of a formal exponential map and formal
volumes on the fiber.
"""

from typing import Dict, List, Sequence

from ..errors import ValidationError
from .derivation import Derivation
from .graded_coordinate import CoordinateSystem
from .poly import Poly


class ConnectionOneForm:
    """
    One degree-0 fiber derivation R_l per base direction.

    Usage:
        R = FormalGeometry.compute_R(phi)
        R.component(0)       # Derivation R_1
    """

    def __init__(self, base_names: Sequence[str], fiber_names: Sequence[str],
                 components: Sequence[Derivation], order: int):
        """
        Raises:
            ValidationError: If the number of components differs from the base dimension
                or a component has nonzero degree
        """
        if len(components) != len(base_names):
            raise ValidationError("Connection needs one component per base coordinate")
        for comp in components:
            if not comp.is_zero() and comp.degree != 0:
                raise ValidationError("Connection components must have degree 0")
        self._base = list(base_names)
        self._fiber = list(fiber_names)
        self._components = list(components)
        self._order = order

    @property
    def base_names(self) -> List[str]:
        return list(self._base)

    @property
    def fiber_names(self) -> List[str]:
        return list(self._fiber)

    @property
    def order(self) -> int:
        return self._order

    @property
    def system(self) -> CoordinateSystem:
        return self._components[0].system

    @property
    def components(self) -> List[Derivation]:
        return list(self._components)

    def component(self, ell: int) -> Derivation:
        return self._components[ell]

    def matrix_entry(self, ell: int, j: int) -> Poly:
        """R_l^j, the coefficient of d/dp^j in R_l."""
        return self._components[ell].component(self._fiber[j])

    def anchor(self) -> List[List[Poly]]:
        """R_l^j at p = 0 (equal to minus the identity)."""
        return [[self.matrix_entry(ell, j).set_zero(self._fiber) for j in range(len(self._fiber))]
                for ell in range(len(self._base))]

    def apply(self, ell: int, f: Poly) -> Poly:
        """R_l acting on a polynomial (embedded into the connection's system if needed)."""
        comp = self._components[ell]
        if f.system != comp.system:
            comp = comp.embed(f.system)
        return comp.apply(f)

    def scaled(self, factor) -> 'ConnectionOneForm':
        """Multiply every component by a scalar."""
        return ConnectionOneForm(self._base, self._fiber, [c.scale(factor) for c in self._components],
                                 self._order)

    def __repr__(self) -> str:
        return f"ConnectionOneForm(base={self._base}, order={self._order})"

    def to_dict(self) -> dict:
        return {
            'order': self._order,
            'components': {f"d{x}": self._components[ell].to_dict() for ell, x in enumerate(self._base)},
        }


class FormalVolume:
    """
    A formal density rho(x, p) times the coordinate volume of the fiber.
    """

    def __init__(self, density: Poly, order: int):
        """
        Raises:
            ValidationError: If rho(x, 0) has no constant term (not invertible as a series)
        """
        if density.constant_term().is_zero():
            raise ValidationError("Formal volume must be invertible at the zero section")
        self._density = density.with_order(order)
        self._order = order

    @property
    def density(self) -> Poly:
        return self._density

    @property
    def order(self) -> int:
        return self._order

    def __repr__(self) -> str:
        return f"FormalVolume({self._density})"

    def to_dict(self) -> Dict[str, object]:
        return {'order': self._order, 'density': str(self._density)}
