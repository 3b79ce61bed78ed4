"""
Graded-commutative algebra operations: products, derivatives, commutators
of derivations and substitution of coordinates.
"""

import logging
from typing import Dict, Mapping, Optional, Tuple

from ...errors import GradedAlgebraError
from ...models.derivation import Derivation
from ...models.graded_coordinate import CoordinateSystem
from ...models.poly import Poly, min_order

logger = logging.getLogger(__name__)


class GradedAlgebra:
    """Static operations on Poly and Derivation values."""

    @staticmethod
    def poly_mul(a: Poly, b: Poly) -> Poly:
        """
        Graded-commutative product, truncated to the smaller order.

        Raises:
            GradedAlgebraError: On coordinate-system mismatch
        """
        if a.system != b.system:
            raise GradedAlgebraError("Coordinate system mismatch")
        return a * b

    @staticmethod
    def derive(name: str, f: Poly) -> Poly:
        """
        Left derivative by a coordinate.

        Raises:
            GradedAlgebraError: If the coordinate is unknown
        """
        return f.derive(name)

    @staticmethod
    def lie_bracket(x: Derivation, y: Derivation) -> Derivation:
        """Graded commutator of two derivations."""
        return x.bracket(y)

    @staticmethod
    def substitute(f: Poly, assignment: Mapping[str, Poly], order: Optional[int] = None,
                   target: Optional[CoordinateSystem] = None) -> Poly:
        """
        Compose f with a coordinate substitution.

        Unassigned coordinates are kept (they must exist in the target
        system). The result is truncated at fiber order `order` of the
        target system.

        Args:
            f: Polynomial to substitute into
            assignment: Map coordinate name -> image polynomial
            order: Fiber truncation order of the result (None for none)
            target: System of the images (default: the images' common system)

        Raises:
            GradedAlgebraError: If an image is not of its coordinate's degree
                or the images live on different systems
        """
        if target is None:
            systems = {img.system for img in assignment.values()}
            if len(systems) > 1:
                raise GradedAlgebraError("Substitution images live on different coordinate systems")
            target = systems.pop() if systems else f.system
        for name, image in assignment.items():
            if image.system != target:
                raise GradedAlgebraError(f"Image of '{name}' lives on another coordinate system")
            expected = f.system[name].degree
            found = image.monomial_degrees()
            if found - {expected}:
                raise GradedAlgebraError(
                    f"Image of '{name}' has degrees {sorted(found)}, expected {expected}")

        order = min_order(order, f.order) if f.system == target else order
        names = f.system.names
        images: Dict[int, Poly] = {}
        for idx, name in enumerate(names):
            if name in assignment:
                images[idx] = assignment[name].truncate(order)
            elif name in f.variables():
                images[idx] = Poly.coordinate(target, name, order)
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(idx: int, exp: int) -> Poly:
            key = (idx, exp)
            if key not in powers:
                powers[key] = images[idx] if exp == 1 else power(idx, exp - 1) * images[idx]
            return powers[key]

        result = Poly.zero(target, order)
        for (mono, k, im), value in f.items():
            term = Poly(target, {((), k, im): value}, order)
            for idx, exp in mono:
                term = term * power(idx, exp)
                if term.is_zero():
                    break
            result = result + term
        logger.debug("Substituted %d coordinates into %d terms", len(assignment), len(f))
        return result
