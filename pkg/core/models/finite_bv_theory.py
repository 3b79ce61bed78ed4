"""
Finite-dimensional BV theories: fields with a degree -1 constant
symplectic structure and a degree-0 action.
"""

from typing import Dict, List, Optional, Tuple

from ..errors import ValidationError
from .derivation import Derivation
from .graded_coordinate import CoordinateSystem
from .poly import Poly
from .report import Report
from .symplectic import ConstantSymplectic


class FiniteBVTheory:
    """
    A BV theory on finitely many fields.

    The system may also contain spectator coordinates (background points,
    their differentials, ambient fields of an auxiliary theory) that the
    symplectic structure does not pair.
    """

    def __init__(self, name: str, omega: ConstantSymplectic, action: Poly,
                 vector_field: Optional[Derivation] = None,
                 components: Optional[Dict[Tuple[str, int], str]] = None,
                 reports: Optional[List[Report]] = None, degree: int = -1):
        """
        Args:
            name: Theory name
            omega: Degree -1 symplectic structure
            action: Degree-0 action
            vector_field: Optional cohomological vector field
            components: Map (target coordinate, source basis index) -> field name
            reports: Checks run while building the theory
            degree: Expected symplectic degree; the action has degree + 1
                (auxiliary theories of a general Q-bundle may differ from -1)

        Raises:
            ValidationError: On wrong degrees or mismatched systems
        """
        if omega.degree != degree:
            raise ValidationError(f"Symplectic structure must have degree {degree}, got {omega.degree}")
        if action.system != omega.system:
            raise ValidationError("Action and symplectic structure live on different systems")
        if not action.is_zero() and action.degree() != degree + 1:
            raise ValidationError(f"Action must have degree {degree + 1}, got {action.degree()}")
        if vector_field is not None and vector_field.system != omega.system:
            raise ValidationError("Vector field lives on another coordinate system")
        self._name = name
        self._omega = omega
        self._action = action
        self._vector_field = vector_field
        self._components = dict(components or {})
        self._reports = list(reports or [])

    @property
    def name(self) -> str:
        return self._name

    @property
    def system(self) -> CoordinateSystem:
        return self._omega.system

    @property
    def omega(self) -> ConstantSymplectic:
        return self._omega

    @property
    def action(self) -> Poly:
        return self._action

    @property
    def vector_field(self) -> Optional[Derivation]:
        return self._vector_field

    @property
    def components(self) -> Dict[Tuple[str, int], str]:
        return dict(self._components)

    def field(self, coordinate: str, basis_index: int) -> str:
        """
        Name of the component field of a target coordinate.

        Raises:
            ValidationError: If there is no such component
        """
        try:
            return self._components[(coordinate, basis_index)]
        except KeyError:
            raise ValidationError(f"No component field for ({coordinate}, {basis_index})") from None

    @property
    def field_names(self) -> List[str]:
        return list(self._omega.support)

    @property
    def reports(self) -> List[Report]:
        return list(self._reports)

    def with_action(self, action: Poly, name: Optional[str] = None) -> 'FiniteBVTheory':
        return FiniteBVTheory(name or self._name, self._omega, action, None, self._components,
                              degree=self._omega.degree)

    def with_vector_field(self, field: Derivation) -> 'FiniteBVTheory':
        return FiniteBVTheory(self._name, self._omega, self._action, field, self._components, self._reports,
                              self._omega.degree)

    def embed(self, target: CoordinateSystem) -> 'FiniteBVTheory':
        """The same theory over a larger system."""
        field = self._vector_field.embed(target) if self._vector_field is not None else None
        return FiniteBVTheory(self._name, self._omega.embed(target), self._action.embed(target), field,
                              self._components, self._reports, self._omega.degree)

    def __repr__(self) -> str:
        return f"FiniteBVTheory({self._name}, fields={len(self._omega.support)})"

    def to_dict(self) -> dict:
        return {
            'name': self._name,
            'fields': self.field_names,
            'action': str(self._action),
        }
