"""
Sparse graded monomials.

A monomial is a tuple of (coordinate index, exponent) pairs sorted by
index; odd coordinates appear with exponent 1 at most. The helpers here
carry the Koszul sign produced when products are brought to that
canonical order.
"""

from typing import Dict, Optional, Sequence, Tuple

MonomialKey = Tuple[Tuple[int, int], ...]

ONE: MonomialKey = ()


class Monomial:
    """Static helpers over canonical monomial keys."""

    @staticmethod
    def from_exponents(exponents: Dict[int, int], odd_flags: Sequence[bool]) -> Tuple[int, MonomialKey]:
        """
        Build a canonical key from an index -> exponent map.

        Returns:
            (sign, key); sign is 0 when an odd coordinate has exponent > 1
        """
        items = []
        for idx in sorted(exponents):
            exp = exponents[idx]
            if exp == 0:
                continue
            if exp < 0:
                raise ValueError(f"Negative exponent {exp} for coordinate #{idx}")
            if odd_flags[idx] and exp > 1:
                return 0, ONE
            items.append((idx, exp))
        return 1, tuple(items)

    @staticmethod
    def multiply(a: MonomialKey, b: MonomialKey, odd_flags: Sequence[bool]) -> Tuple[int, MonomialKey]:
        """
        Multiply two canonical monomials.

        Each odd factor of b is moved left past the odd factors of a with a
        larger index; every such transposition contributes a sign.

        Returns:
            (sign, key); sign 0 signals a repeated odd coordinate
        """
        if not a:
            return 1, b
        if not b:
            return 1, a
        out = []
        sign = 1
        i = j = 0
        odd_a_remaining = sum(1 for idx, _ in a if odd_flags[idx])
        while i < len(a) and j < len(b):
            ia, ea = a[i]
            ib, eb = b[j]
            if ia < ib:
                out.append(a[i])
                if odd_flags[ia]:
                    odd_a_remaining -= 1
                i += 1
            elif ib < ia:
                if odd_flags[ib] and odd_a_remaining % 2:
                    sign = -sign
                out.append(b[j])
                j += 1
            else:
                if odd_flags[ia]:
                    return 0, ONE
                out.append((ia, ea + eb))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return sign, tuple(out)

    @staticmethod
    def degree(key: MonomialKey, degrees: Sequence[int]) -> int:
        """Total ghost number of a monomial."""
        return sum(degrees[idx] * exp for idx, exp in key)

    @staticmethod
    def parity(key: MonomialKey, odd_flags: Sequence[bool]) -> int:
        """Parity of a monomial (number of odd factors mod 2)."""
        return sum(1 for idx, _ in key if odd_flags[idx]) % 2

    @staticmethod
    def weight(key: MonomialKey, fiber_flags: Sequence[bool]) -> int:
        """Total exponent in fiber-kind coordinates."""
        return sum(exp for idx, exp in key if fiber_flags[idx])

    @staticmethod
    def exponent(key: MonomialKey, index: int) -> int:
        """Exponent of a coordinate in the monomial."""
        for idx, exp in key:
            if idx == index:
                return exp
            if idx > index:
                break
        return 0

    @staticmethod
    def derive(key: MonomialKey, index: int, odd_flags: Sequence[bool]) -> Tuple[int, MonomialKey]:
        """
        Left derivative of a monomial by one coordinate.

        Returns:
            (factor, key); factor is 0 when the coordinate is absent. For an
            odd coordinate the factor is the sign (-1)^(odd factors before it).
        """
        odd_before = 0
        for pos, (idx, exp) in enumerate(key):
            if idx == index:
                rest = key[:pos] + ((idx, exp - 1),) + key[pos + 1:] if exp > 1 else key[:pos] + key[pos + 1:]
                if odd_flags[idx]:
                    return (-1 if odd_before % 2 else 1), rest
                return exp, rest
            if idx > index:
                break
            if odd_flags[idx]:
                odd_before += 1
        return 0, ONE

    @staticmethod
    def remove(key: MonomialKey, indices) -> Optional[MonomialKey]:
        """Drop coordinates from a key, or None when one of them is present."""
        for idx, _ in key:
            if idx in indices:
                return None
        return key

    @staticmethod
    def split(key: MonomialKey, indices) -> Tuple[MonomialKey, MonomialKey]:
        """Split a key into the part on the given indices and the rest (order kept)."""
        inside = tuple(item for item in key if item[0] in indices)
        outside = tuple(item for item in key if item[0] not in indices)
        return inside, outside

    @staticmethod
    def sort_key(key: MonomialKey, degrees_len: int) -> Tuple:
        """
        Deterministic ordering key: total exponent first, then exponent vector
        by declaration index.
        """
        total = sum(exp for _, exp in key)
        dense = [0] * degrees_len
        for idx, exp in key:
            dense[idx] = exp
        return (total, tuple(-e for e in dense))
