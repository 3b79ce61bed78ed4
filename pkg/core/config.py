"""
Default settings for checks, numerics and reporting.

Theory files may override `order` and `seed`; command-line flags override
the theory file.
"""

from dataclasses import dataclass, replace
from typing import Optional

CONVENTION_VERSION = "gbv-signs-1"


@dataclass(frozen=True)
class Settings:
    """Tunable defaults used across the package."""

    order: int = 4
    seed: int = 0
    max_arity: int = 6
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    residual_cap: int = 10
    convention_version: str = CONVENTION_VERSION

    def with_overrides(self, order: Optional[int] = None, seed: Optional[int] = None) -> 'Settings':
        """Return a copy with the given fields replaced when not None."""
        changes = {}
        if order is not None:
            changes['order'] = order
        if seed is not None:
            changes['seed'] = seed
        return replace(self, **changes)


DEFAULT_SETTINGS = Settings()
