"""Schreier families S_n: membership witnesses, admissibility and maximal weighted sums.

S_0 holds the singletons, and a set is in S_{n+1} when it splits into successive
pieces F_1 < ... < F_k of S_n with k <= min F_1.  The empty set is treated as a
member of every S_n (the families are hereditary).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from .vectors import RationalVector


@dataclass(frozen=True)
class SchreierWitness:
    level: int
    elements: tuple[int, ...]
    children: tuple[SchreierWitness, ...] = field(default=())

    def to_json(self):
        if self.level == 0:
            return {"level": 0, "elements": [str(e) for e in self.elements]}
        return {
            "level": self.level,
            "elements": [str(e) for e in self.elements],
            "children": [c.to_json() for c in self.children],
        }

    @classmethod
    def from_json(cls, data) -> SchreierWitness:
        return cls(
            int(data["level"]),
            tuple(int(e) for e in data["elements"]),
            tuple(cls.from_json(c) for c in data.get("children", [])),
        )


def check_witness(w: SchreierWitness) -> bool:
    """Independently verify the structural constraints of a decomposition tree."""
    if list(w.elements) != sorted(set(w.elements)):
        return False
    if not w.elements:
        return not w.children
    if w.level == 0:
        return len(w.elements) == 1 and not w.children
    if len(w.children) > w.elements[0]:
        return False
    flat: list[int] = []
    for c in w.children:
        if c.level != w.level - 1 or not c.elements or not check_witness(c):
            return False
        flat.extend(c.elements)
    return tuple(flat) == w.elements


def _prefix_length(F: tuple[int, ...], start: int, n: int) -> int:
    """Length of the longest prefix of F[start:] that lies in S_n (greedy)."""
    if start >= len(F):
        return 0
    if n == 0:
        return 1
    pos, pieces, allowed = start, 0, F[start]
    while pos < len(F) and pieces < allowed:
        pos += _prefix_length(F, pos, n - 1)
        pieces += 1
    return pos - start


def _build(F: tuple[int, ...], n: int) -> SchreierWitness:
    if n == 0:
        return SchreierWitness(0, F)
    children = []
    pos = 0
    while pos < len(F):
        step = _prefix_length(F, pos, n - 1)
        children.append(_build(F[pos:pos + step], n - 1))
        pos += step
    return SchreierWitness(n, F, tuple(children))


def _normalise(F: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(int(e) for e in F)))
    if out and out[0] < 1:
        raise ValueError("Schreier sets live in the positive integers")
    return out


def effective_level(size: int, n: int) -> int:
    """A set with k elements lies in some S_n iff it lies in S_min(n, k)."""
    return min(n, max(size, 1))


def is_member(F: Iterable[int], n: int) -> SchreierWitness | None:
    """Witness of F in S_n built from the greedy left-maximal split, or None."""
    F = _normalise(F)
    if n < 0:
        raise ValueError("level must be non-negative")
    if not F:
        return SchreierWitness(n, ())
    m = effective_level(len(F), n)
    if _prefix_length(F, 0, m) != len(F):
        return None
    w = _build(F, m)
    # lift to the requested level by wrapping in single-child nodes
    while w.level < n:
        w = SchreierWitness(w.level + 1, F, (w,))
    return w


def member(F: Iterable[int], n: int) -> bool:
    F = _normalise(F)
    if not F:
        return True
    m = effective_level(len(F), n)
    return _prefix_length(F, 0, m) == len(F)


def greedy_pieces(F: Iterable[int], n: int) -> list[tuple[int, ...]]:
    """Split F into maximal successive pieces of S_n (left to right)."""
    F = _normalise(F)
    pieces, pos = [], 0
    while pos < len(F):
        step = _prefix_length(F, pos, effective_level(len(F) - pos, n))
        pieces.append(F[pos:pos + step])
        pos += step
    return pieces


def is_admissible(blocks, n: int) -> bool:
    """Blocks (vectors or functionals' vectors) whose minimal supports form an S_n set."""
    mins = [b.min_support if isinstance(b, RationalVector) else int(b) for b in blocks]
    return member(mins, n)


class SearchTooLarge(RuntimeError):
    """The exact search would exceed its configured state budget."""


def _common_scale(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


class _Fenwick:
    def __init__(self, n: int):
        self.n = n
        self.cnt = [0] * (n + 1)
        self.tot = [0] * (n + 1)
        self.top = 1 << max(n.bit_length() - 1, 0) if n else 0

    def add(self, i: int, value: int):
        i += 1
        while i <= self.n:
            self.cnt[i] += 1
            self.tot[i] += value
            i += i & -i

    def best(self, k: int) -> int:
        """Sum of the k inserted entries of smallest rank (ranks are unique)."""
        if k <= 0:
            return 0
        pos, got, acc = 0, 0, 0
        step = self.top
        while step:
            nxt = pos + step
            if nxt <= self.n and got + self.cnt[nxt] <= k:
                pos = nxt
                got += self.cnt[nxt]
                acc += self.tot[nxt]
            step >>= 1
        return acc


def _max_sum_level_one(idx: list[int], w: list[int]) -> tuple[int, frozenset[int]]:
    n = len(idx)
    order = sorted(range(n), key=lambda i: (-w[i], i))
    rank = {p: r for r, p in enumerate(order)}
    tree = _Fenwick(n)
    best_val, best_start = -1, None
    for i in range(n - 1, -1, -1):
        want = min(idx[i] - 1, n - 1 - i)
        val = w[i] + tree.best(want)
        if val > best_val:
            best_val, best_start = val, i
        tree.add(rank[i], w[i])
    i = best_start
    later = sorted(range(i + 1, n), key=lambda j: (-w[j], j))[: idx[i] - 1]
    return best_val, frozenset([idx[i]] + [idx[j] for j in later])


def max_schreier_sum(
    weights: Mapping[int, object] | RationalVector,
    n: int,
    max_states: int = 2_000_000,
) -> tuple[Fraction, frozenset[int]]:
    """Maximum of sum(weights[G]) over G in S_n, with an attaining G.

    Exact.  Level 1 uses a rank tree; higher levels run a dynamic programme over
    the states of the greedy membership automaton (the remaining room of the
    currently open piece at each level).
    """
    items = weights.items() if not isinstance(weights, RationalVector) else weights.items()
    pos_items = []
    for k, c in items:
        c = Fraction(c)
        if c < 0:
            raise ValueError("weights must be non-negative")
        if c:
            pos_items.append((int(k), c))
    pos_items.sort()
    if not pos_items:
        return Fraction(0), frozenset()
    idx = [k for k, _ in pos_items]
    scale = _common_scale(c for _, c in pos_items)
    w = [int(c * scale) for _, c in pos_items]
    if member(idx, n):
        return Fraction(sum(w), scale), frozenset(idx)
    m = effective_level(len(idx), n)
    if m == 0:
        j = max(range(len(w)), key=lambda t: (w[t], -t))
        return Fraction(w[j], scale), frozenset([idx[j]])
    if m == 1:
        val, G = _max_sum_level_one(idx, w)
        return Fraction(val, scale), G

    # states: caps tuple -> (value, linked list of chosen indices)
    states: dict = {None: (0, None)}
    for e, we in zip(idx, w):
        new = dict(states)
        for caps, (val, chain) in states.items():
            nxt = automaton_step(caps, e, m)
            if nxt is False:
                continue
            cand = val + we
            old = new.get(nxt)
            if old is None or cand > old[0]:
                new[nxt] = (cand, (e, chain))
        states = new
        if len(states) > max_states:
            raise SearchTooLarge(f"more than {max_states} automaton states")
    val, chain = max(states.values(), key=lambda t: t[0])
    chosen = []
    while chain is not None:
        chosen.append(chain[0])
        chain = chain[1]
    return Fraction(val, scale), frozenset(chosen)


def automaton_step(caps: tuple[int, ...] | None, e: int, n: int) -> tuple[int, ...] | None | bool:
    """Advance the membership automaton of S_n by the next (larger) element e.

    ``caps`` is None before the first element.  Returns the new state, or False
    when adding e leaves S_n.  For n = 0 the state after one element is ().
    """
    if n == 0:
        return () if caps is None else False
    if caps is None:
        return (e - 1,) * n
    j = next((t for t, c in enumerate(caps) if c > 0), None)
    if j is None:
        return False
    return (e - 1,) * j + (caps[j] - 1,) + caps[j + 1:]
