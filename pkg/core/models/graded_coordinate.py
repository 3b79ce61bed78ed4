"""
Graded coordinates and coordinate systems.

A coordinate carries a ghost-number degree and a kind. Fiber coordinates
count towards the truncation weight of a polynomial; base coordinates
(background points, their differentials, parameters) do not.
"""

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..errors import GradedAlgebraError

BASE = "base"
FIBER = "fiber"


class GradedCoordinate:
    """
    A single graded coordinate.

    Coordinates are immutable and compare by (name, degree, kind).
    """

    def __init__(self, name: str, degree: int = 0, kind: str = BASE):
        """
        Initialize a coordinate.

        Args:
            name: Identifier, unique within a coordinate system
            degree: Ghost number
            kind: Either "base" or "fiber"

        Raises:
            GradedAlgebraError: If the name is empty or the kind unknown
        """
        if not name:
            raise GradedAlgebraError("Coordinate name cannot be empty")
        if kind not in (BASE, FIBER):
            raise GradedAlgebraError(f"Unknown coordinate kind '{kind}'")
        self._name = name
        self._degree = int(degree)
        self._kind = kind

    @property
    def name(self) -> str:
        """Get the coordinate name."""
        return self._name

    @property
    def degree(self) -> int:
        """Get the ghost number."""
        return self._degree

    @property
    def parity(self) -> int:
        """Get the parity (degree mod 2)."""
        return self._degree % 2

    @property
    def is_odd(self) -> bool:
        """Check whether the coordinate anticommutes with itself."""
        return self._degree % 2 == 1

    @property
    def kind(self) -> str:
        """Get the coordinate kind."""
        return self._kind

    @property
    def is_fiber(self) -> bool:
        """Check whether the coordinate counts towards truncation."""
        return self._kind == FIBER

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedCoordinate):
            return False
        return (self._name, self._degree, self._kind) == (other._name, other._degree, other._kind)

    def __hash__(self) -> int:
        return hash((self._name, self._degree, self._kind))

    def __repr__(self) -> str:
        return f"GradedCoordinate({self._name!r}, degree={self._degree}, kind={self._kind!r})"

    def to_dict(self) -> dict:
        """Convert to a dictionary."""
        return {'name': self._name, 'degree': self._degree, 'kind': self._kind}

    @classmethod
    def from_dict(cls, data: dict) -> 'GradedCoordinate':
        """Create a coordinate from its dictionary form."""
        return cls(data['name'], data.get('degree', 0), data.get('kind', BASE))


class CoordinateSystem:
    """
    An ordered, immutable collection of graded coordinates.

    Declaration order fixes the canonical order of monomials. Two systems
    are equal when they declare the same coordinates in the same order.
    """

    def __init__(self, coordinates: Iterable[GradedCoordinate]):
        """
        Initialize a coordinate system.

        Args:
            coordinates: Coordinates in declaration order

        Raises:
            GradedAlgebraError: If two coordinates share a name
        """
        self._coords: Tuple[GradedCoordinate, ...] = tuple(coordinates)
        self._index: Dict[str, int] = {}
        for i, coord in enumerate(self._coords):
            if coord.name in self._index:
                raise GradedAlgebraError(f"Duplicate coordinate name '{coord.name}'")
            self._index[coord.name] = i
        self._degrees = tuple(c.degree for c in self._coords)
        self._odd = tuple(c.is_odd for c in self._coords)
        self._fiber = tuple(c.is_fiber for c in self._coords)
        self._hash = hash(self._coords)

    @classmethod
    def from_specs(cls, specs: Sequence[Tuple]) -> 'CoordinateSystem':
        """
        Build a system from (name, degree[, kind]) tuples.

        Usage:
            CoordinateSystem.from_specs([("x", 0, "fiber"), ("xi", 1)])
        """
        coords = []
        for spec in specs:
            name, degree = spec[0], spec[1]
            kind = spec[2] if len(spec) > 2 else BASE
            coords.append(GradedCoordinate(name, degree, kind))
        return cls(coords)

    @property
    def coordinates(self) -> Tuple[GradedCoordinate, ...]:
        """Get the coordinates in declaration order."""
        return self._coords

    @property
    def names(self) -> List[str]:
        """Get the coordinate names in declaration order."""
        return [c.name for c in self._coords]

    @property
    def degrees(self) -> Tuple[int, ...]:
        """Get the degree of each coordinate by index."""
        return self._degrees

    @property
    def odd_flags(self) -> Tuple[bool, ...]:
        """Get the parity flag of each coordinate by index."""
        return self._odd

    @property
    def fiber_flags(self) -> Tuple[bool, ...]:
        """Get the fiber flag of each coordinate by index."""
        return self._fiber

    def __len__(self) -> int:
        return len(self._coords)

    def __iter__(self) -> Iterator[GradedCoordinate]:
        return iter(self._coords)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> GradedCoordinate:
        return self._coords[self.index(name)]

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, CoordinateSystem):
            return False
        return self._coords == other._coords

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{c.name}:{c.degree}{'*' if c.is_fiber else ''}" for c in self._coords)
        return f"CoordinateSystem({inner})"

    def index(self, name: str) -> int:
        """
        Get the declaration index of a coordinate.

        Raises:
            GradedAlgebraError: If the coordinate is unknown
        """
        try:
            return self._index[name]
        except KeyError:
            raise GradedAlgebraError(f"Unknown coordinate '{name}'") from None

    def get(self, name: str) -> Optional[GradedCoordinate]:
        """Get a coordinate by name, or None."""
        i = self._index.get(name)
        return None if i is None else self._coords[i]

    def extend(self, coordinates: Iterable[GradedCoordinate]) -> 'CoordinateSystem':
        """Return a new system with extra coordinates appended."""
        return CoordinateSystem(list(self._coords) + list(coordinates))

    def union(self, other: 'CoordinateSystem') -> 'CoordinateSystem':
        """
        Return the system with the coordinates of other not already present appended.

        Raises:
            GradedAlgebraError: If a shared name has a different degree or kind
        """
        extra = []
        for coord in other:
            mine = self.get(coord.name)
            if mine is None:
                extra.append(coord)
            elif mine != coord:
                raise GradedAlgebraError(f"Coordinate '{coord.name}' declared twice with different data")
        return self.extend(extra) if extra else self

    def with_kind(self, names: Iterable[str], kind: str) -> 'CoordinateSystem':
        """Return a copy where the listed coordinates have the given kind."""
        chosen = set(names)
        return CoordinateSystem(
            GradedCoordinate(c.name, c.degree, kind) if c.name in chosen else c
            for c in self._coords
        )

    def to_dict(self) -> dict:
        """Convert to a dictionary."""
        return {'coordinates': [c.to_dict() for c in self._coords]}

    @classmethod
    def from_dict(cls, data: dict) -> 'CoordinateSystem':
        """Create a system from its dictionary form."""
        return cls(GradedCoordinate.from_dict(c) for c in data['coordinates'])
