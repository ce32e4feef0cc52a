"""Brute-force oracles straight from the definitions, independent of the fast code paths."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations


@lru_cache(maxsize=None)
def in_schreier_by_definition(F: tuple[int, ...], n: int) -> bool:
    """Membership straight from the recursive definition: try every split."""
    if not F:
        return True
    if n == 0:
        return len(F) == 1
    # fewest successive S_{n-1} pieces covering F, over all split points
    need = [0] + [None] * len(F)
    for end in range(1, len(F) + 1):
        best = None
        for start in range(end):
            if need[start] is not None and in_schreier_by_definition(F[start:end], n - 1):
                cand = need[start] + 1
                if best is None or cand < best:
                    best = cand
        need[end] = best
    return need[len(F)] is not None and need[len(F)] <= F[0]


def max_sum_by_enumeration(weights: dict[int, Fraction], n: int) -> Fraction:
    keys = sorted(k for k, c in weights.items() if c)
    best = Fraction(0)
    for r in range(1, len(keys) + 1):
        for G in combinations(keys, r):
            if in_schreier_by_definition(G, n):
                best = max(best, sum(weights[k] for k in G))
    return best
