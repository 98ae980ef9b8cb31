"""Non-crossing partitions of ``{0, ..., n-1}`` and their Kreweras complements."""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

from .errors import DomainError

MAX_N = 12


def _nc(lo, hi):
    """Yield non-crossing partitions of ``range(lo, hi)`` as lists of blocks."""
    if lo >= hi:
        yield []
        return

    def grow(block):
        last = block[-1]
        for rest in _nc(last + 1, hi):
            yield [block] + rest
        for j in range(last + 1, hi):
            for gap in _nc(last + 1, j):
                for tail in grow(block + (j,)):
                    yield gap + tail

    yield from grow((lo,))


def kreweras(blocks, n):
    """Kreweras complement, computed as the permutation ``pi^{-1} o gamma``.

    ``pi`` sends each element to the next one in its block (cyclically) and
    ``gamma`` is ``i -> i+1 mod n``.
    """
    inv = [0] * n
    for block in blocks:
        k = len(block)
        for i in range(k):
            inv[block[(i + 1) % k]] = block[i]
    perm = [inv[(i + 1) % n] for i in range(n)]
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i)
            i = perm[i]
        out.append(tuple(sorted(cycle)))
    return tuple(sorted(out))


def nc_partitions(n: int, with_kreweras: bool = False):
    """All non-crossing partitions of ``{0, ..., n-1}``.

    Each partition is a sorted tuple of sorted blocks.  With
    ``with_kreweras`` the result is a list of ``(partition, complement)`` pairs.
    """
    if n < 1 or n > MAX_N:
        raise DomainError(f"non-crossing enumeration supports 1 <= n <= {MAX_N}")
    parts = [tuple(sorted(p)) for p in _nc(0, n)]
    if with_kreweras:
        return [(p, kreweras(p, n)) for p in parts]
    return parts


def _sizes(blocks):
    return tuple(sorted(len(b) for b in blocks))


@lru_cache(maxsize=None)
def block_types(n: int) -> Counter:
    """Multiset of block-size types over ``NC(n)``."""
    return Counter(_sizes(p) for p in _nc(0, n))


@lru_cache(maxsize=None)
def kreweras_types(n: int) -> Counter:
    """Counts of ``(type of pi, type of K(pi))`` over ``NC(n)``."""
    if n < 1 or n > MAX_N:
        raise DomainError(f"non-crossing enumeration supports 1 <= n <= {MAX_N}")
    counts = Counter()
    for p in _nc(0, n):
        counts[(_sizes(p), _sizes(kreweras(p, n)))] += 1
    return counts
