"""Exact integer combinatorics: ordered compositions and binomial sums.

All routines work on Python integers, so nothing overflows.
"""
from __future__ import annotations

import math
from typing import Iterator, NamedTuple

from .errors import InvalidArgumentError

__all__ = [
    "Composition",
    "iter_compositions",
    "compositions",
    "count_compositions",
    "binomial",
    "subset_convolution_identity",
]


class Composition(NamedTuple):
    """An ordered tuple of strictly positive integers.

    >>> Composition.of(1, 2)
    Composition(parts=(1, 2), total=3, length=2)
    """

    parts: tuple[int, ...]
    total: int
    length: int

    @classmethod
    def of(cls, *parts: int) -> "Composition":
        if not parts or any(p < 1 for p in parts):
            raise InvalidArgumentError("composition parts must be positive integers")
        return cls(tuple(parts), sum(parts), len(parts))


def _check_jl(j, ell):
    if ell < 1 or j < 1 or ell > j:
        raise InvalidArgumentError(f"need 1 <= l <= j, got j={j}, l={ell}")


def iter_compositions(j: int, ell: int, max_part: int | None = None) -> Iterator[Composition]:
    """Yield the compositions of `j` into `ell` parts in lexicographic order.

    Parameters
    ----------
    j, ell : int
        Total and number of parts, ``1 <= ell <= j``.
    max_part : int, optional
        Only yield compositions whose parts are all ``<= max_part``.
        Products of series coefficients vanish for parts beyond the
        degree of the series, so callers use this to skip them.
    """
    _check_jl(j, ell)
    top = j - ell + 1 if max_part is None else min(max_part, j - ell + 1)

    def rec(remaining, slots):
        if slots == 1:
            if remaining <= top:
                yield (remaining,)
            return
        # leave at least one unit for each later slot
        for first in range(1, min(top, remaining - slots + 1) + 1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    for parts in rec(j, ell):
        yield Composition(parts, j, ell)


def compositions(j: int, ell: int) -> list[Composition]:
    """All compositions of `j` into `ell` parts, lexicographically sorted.

    >>> [c.parts for c in compositions(3, 2)]
    [(1, 2), (2, 1)]
    """
    return list(iter_compositions(j, ell))


def count_compositions(j: int, ell: int) -> int:
    """Number of compositions of `j` into `ell` parts, ``C(j-1, ell-1)``."""
    _check_jl(j, ell)
    return math.comb(j - 1, ell - 1)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient; zero when ``k > n``."""
    if n < 0 or k < 0:
        raise InvalidArgumentError("binomial arguments must be nonnegative")
    return math.comb(n, k)


def subset_convolution_identity(N: int, j: int) -> tuple[int, int, bool]:
    """Check ``sum_k C(N/2, k) C(N/2 - k, j - 2k) 2**(j - 2k) == C(N, j)``.

    The sum runs over ``k = 0 .. j // 2``; it counts the ways of picking
    `j` items from `N/2` pairs by choosing `k` full pairs and one item
    from each of `j - 2k` further pairs.

    Returns
    -------
    (lhs, rhs, equal)
    """
    if N < 2 or N % 2:
        raise InvalidArgumentError(f"N must be a positive even integer, got {N}")
    if not 1 <= j <= N:
        raise InvalidArgumentError(f"need 1 <= j <= N, got j={j}")
    half = N // 2
    lhs = 0
    for k in range(j // 2 + 1):
        lhs += binomial(half, k) * binomial(half - k, j - 2 * k) * 2 ** (j - 2 * k)
    rhs = binomial(N, j)
    return lhs, rhs, lhs == rhs
