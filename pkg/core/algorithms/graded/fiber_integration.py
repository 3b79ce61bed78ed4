"""
Finite-dimensional fiber integrals: Berezin integration over odd
coordinates and formal Gaussian (Wick) moments over even ones.
"""

import logging
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

from ...errors import GradedAlgebraError
from ...models.monomial import Monomial
from ...models.poly import Poly
from ...models.scalar import Scalar

logger = logging.getLogger(__name__)

Covariance = Mapping[Tuple[str, str], Union[int, Scalar, object]]


def all_pairings(items: Sequence) -> Iterator[List[Tuple]]:
    """
    Yield all perfect pairings of the given items.

    Items are paired by position, so repeated values are distinct slots.
    """
    items = list(items)
    if not items:
        yield []
        return
    first = items.pop(0)
    for i, item in enumerate(items):
        for rest in all_pairings(items[:i] + items[i + 1:]):
            yield [(first, item)] + rest


class FiberIntegration:
    """Static Berezin and Wick integration."""

    @staticmethod
    def berezin_integral(f: Poly, odds: Sequence[str]) -> Poly:
        """
        Iterated Berezin integral.

        The list reads like the measure d(odds[0]) ... d(odds[-1]); the last
        entry is integrated first, and each step takes the left derivative,
        so that the integral of xi dxi is 1.

        Raises:
            GradedAlgebraError: If a listed coordinate is even
        """
        for name in odds:
            if not f.system[name].is_odd:
                raise GradedAlgebraError(f"Berezin integration over even coordinate '{name}'")
        result = f
        for name in reversed(list(odds)):
            result = result.derive(name)
        return result

    @staticmethod
    def wick_integrate(f: Poly, cov: Covariance, variables: Sequence[str]) -> Poly:
        """
        Formal Gaussian expectation over the listed even variables.

        Other coordinates act as parameters. Covariance entries may be
        rationals or Scalars; missing entries are zero and the matrix is
        read symmetrically.

        Raises:
            GradedAlgebraError: If a listed variable is odd
        """
        system = f.system
        for name in variables:
            if system[name].is_odd:
                raise GradedAlgebraError(f"Wick integration over odd coordinate '{name}'")
        index = {system.index(n): n for n in variables}
        entries: Dict[Tuple[str, str], Scalar] = {}
        for (a, b), value in cov.items():
            entries[(a, b)] = Scalar.of(value)
            entries[(b, a)] = Scalar.of(value)

        @lru_cache(maxsize=None)
        def moment(slots: Tuple[str, ...]) -> Scalar:
            if len(slots) % 2:
                return Scalar()
            total = Scalar()
            for pairing in all_pairings(slots):
                product = Scalar.of(1)
                for a, b in pairing:
                    value = entries.get((a, b))
                    if value is None:
                        product = Scalar()
                        break
                    product = product * value
                total = total + product
            return total

        result = Poly.zero(system, f.order)
        for (mono, k, im), value in f.items():
            inside, outside = Monomial.split(mono, index)
            slots = tuple(index[idx] for idx, exp in inside for _ in range(exp))
            weight = moment(slots)
            if weight.is_zero():
                continue
            term = Poly(system, {(outside, k, im): value}, f.order)
            result = result + term.scale(weight)
        return result

    @staticmethod
    def wick_moment(cov: Covariance, f: Poly) -> Scalar:
        """
        Gaussian moment of a polynomial in even coordinates.

        Raises:
            GradedAlgebraError: If f contains an odd coordinate or a
                coordinate without covariance data
        """
        names = set()
        for a, b in cov:
            names.update((a, b))
        for name in f.variables():
            if f.system[name].is_odd:
                raise GradedAlgebraError(f"Odd coordinate '{name}' in Wick moment")
            if name not in names:
                raise GradedAlgebraError(f"Coordinate '{name}' has no covariance entry")
        ordered = [n for n in f.system.names if n in names]
        return FiberIntegration.wick_integrate(f, cov, ordered).constant_term()
