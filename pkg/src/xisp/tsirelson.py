"""The Tsirelson norm ‖·‖_T, the equivalent norm |||·|||, and certified bounds.

‖x‖_T = max{‖x‖_∞, sup ½ Σ_j ‖E_j x‖_T}, the sup over d ≤ E_1 < ... < E_d.
Because the norm is 1-unconditional and subadditive over successive pieces, the
exact routine works on |x| and only lets the parts be intervals of the support;
the brute-force oracle enumerates arbitrary successive subsets instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import schreier
from .functionals import HalfSum, Term, Unit
from .schreier import SearchTooLarge, max_schreier_sum
from .vectors import RationalVector

BRUTE_FORCE_CAP = 8
EXACT_CAP = 40


class SupportTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class TsirelsonWitness:
    term: Term
    value: Fraction


def _scaled(v: RationalVector, extra_bits: int):
    """Support points, signs and |coefficients| as integers over a common scale."""
    pts = [k for k, _ in v.items()]
    signs = [1 if c > 0 else -1 for _, c in v.items()]
    den = 1
    for _, c in v.items():
        den = lcm(den, c.denominator)
    vals = [int(abs(c) * den) << extra_bits for _, c in v.items()]
    return pts, signs, vals, den << extra_bits


def _interval_dp(v: RationalVector, parts_factor: int, want_witness: bool):
    """Exact value (and optionally a witness) of the halving recursion on v.

    ``parts_factor`` is 1 for ‖·‖_T (d ≤ min E_1 parts) and 2 for |||·|||.
    """
    n = len(v)
    if n == 0:
        return Fraction(0), None
    pts, signs, a, scale = _scaled(v, n)
    prefix = [0]
    for x in a:
        prefix.append(prefix[-1] + x)

    T = [[0] * n for _ in range(n)]
    choice = [[None] * n for _ in range(n)]
    pmemo: dict[tuple[int, int, int], tuple[int, int | None]] = {}

    def P(b: int, j: int, r: int):
        """Best sum of T over partitions of [b..j] into at most r intervals."""
        length = j - b + 1
        if r >= length:
            return prefix[j + 1] - prefix[b], -1  # singletons
        if r == 1:
            return T[b][j], None
        key = (b, j, r)
        hit = pmemo.get(key)
        if hit is not None:
            return hit
        best, arg = T[b][j], None
        for m in range(b, j):
            cand = T[b][m] + P(m + 1, j, r - 1)[0]
            if cand > best:
                best, arg = cand, m
        pmemo[key] = (best, arg)
        return best, arg

    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length - 1
            best, how = a[i], ("leaf",)
            if length > 1:
                if T[i + 1][j] > best:
                    best, how = T[i + 1][j], ("skip",)
                cap = min(parts_factor * pts[i], length)
                if cap >= 2:
                    top = 0
                    arg = None
                    for m in range(i, j):
                        cand = T[i][m] + P(m + 1, j, cap - 1)[0]
                        if cand > top:
                            top, arg = cand, m
                    if top // 2 > best:
                        best, how = top // 2, ("split", arg, cap - 1)
            T[i][j] = best
            choice[i][j] = how

    value = Fraction(T[0][n - 1], scale)
    if not want_witness:
        return value, None

    def intervals(b, j, r):
        _, arg = P(b, j, r)
        if arg == -1:
            return [(k, k) for k in range(b, j + 1)]
        if arg is None:
            return [(b, j)]
        return [(b, arg)] + intervals(arg + 1, j, r - 1)

    def build(i, j) -> Term:
        how = choice[i][j]
        if how[0] == "leaf":
            return Unit(pts[i], signs[i])
        if how[0] == "skip":
            return build(i + 1, j)
        _, m, r = how
        parts = [(i, m)] + intervals(m + 1, j, r)
        return HalfSum(tuple(build(b, e) for b, e in parts))

    return value, build(0, n - 1)


def tsirelson_norm(v: RationalVector) -> tuple[Fraction, TsirelsonWitness]:
    """Exact ‖v‖_T with a W_T witness evaluating to it."""
    value, term = _interval_dp(v, 1, True)
    if term is None:
        term = HalfSum(())
    return value, TsirelsonWitness(term, value)


def tsirelson_value(v: RationalVector) -> Fraction:
    return _interval_dp(v, 1, False)[0]


def modified_norm(v: RationalVector) -> Fraction:
    """Exact |||v||| (up to 2d parts after d ≤ min E_1)."""
    return _interval_dp(v, 2, False)[0]


def modified_norm_with_witness(v: RationalVector) -> tuple[Fraction, Term]:
    value, term = _interval_dp(v, 2, True)
    return value, term if term is not None else HalfSum(())


def brute_force_tsirelson(v: RationalVector, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """‖v‖_T by enumerating every family of successive subsets of the support.

    Norms of sub-supports are cached within the call (the enumeration itself is
    complete).  Single-part families are omitted: they contribute at most half
    the norm of the whole vector.
    """
    if len(v) > cap:
        raise SupportTooLarge(f"support of size {len(v)} exceeds the oracle cap {cap}")
    pts = [k for k, _ in v.items()]
    vals = [abs(c) for _, c in v.items()]
    memo: dict[tuple[int, ...], Fraction] = {}

    def norm(S: tuple[int, ...]) -> Fraction:
        if not S:
            return Fraction(0)
        hit = memo.get(S)
        if hit is not None:
            return hit
        best = max(vals[i] for i in S)
        stack = [(0, (), ())]  # (position in S, closed parts, open part)
        while stack:
            pos, closed, current = stack.pop()
            if pos == len(S):
                fam = closed + ((current,) if current else ())
                if len(fam) >= 2 and len(fam) <= pts[fam[0][0]]:
                    total = sum(norm(E) for E in fam) / 2
                    if total > best:
                        best = total
                continue
            e = S[pos]
            stack.append((pos + 1, closed, current))  # skip e
            if current:
                stack.append((pos + 1, closed, current + (e,)))  # extend open part
                n_parts = len(closed) + 1
                first = closed[0][0] if closed else current[0]
                if n_parts + 1 <= pts[first]:
                    stack.append((pos + 1, closed + (current,), (e,)))
            else:
                stack.append((pos + 1, closed, (e,)))
        memo[S] = best
        return best

    return norm(tuple(range(len(pts))))


# -- bounds for large supports ------------------------------------------------

@dataclass(frozen=True)
class TsirelsonBounds:
    lower: Fraction
    upper: Fraction
    witness: Term
    exact: bool


def schreier_layer_bounds(v: RationalVector, max_level: int = 8,
                          max_states: int = 20_000) -> TsirelsonBounds:
    """Two-sided bounds on ‖v‖_T from maximal Schreier sums of |v|.

    In a norming tree the leaves of depth at most t form a set of S_t, and a leaf
    at depth h carries the factor 2^{-h}.  Summation by parts then gives
    f(|v|) ≤ Σ_{t≥1} 2^{-(t+1)} M_t with M_t the largest S_t-sum of |v|; terms
    that cannot be computed are replaced by the ℓ_1 mass.  Conversely 2^{-t}
    times the indicator of an S_t set is a norming functional, giving the lower
    bound with an explicit witness.
    """
    x = v.abs()
    signs = dict((k, 1 if c > 0 else -1) for k, c in v.items())
    if not x:
        return TsirelsonBounds(Fraction(0), Fraction(0), HalfSum(()), True)
    total = x.l1_norm()
    top_k = max(x.items(), key=lambda kc: kc[1])[0]
    lower, witness = x.sup_norm(), Unit(top_k, signs[top_k])
    upper = Fraction(0)
    weight = Fraction(1, 4)
    for t in range(1, max_level + 1):
        if schreier.member(x.support(), t):
            M, G = total, frozenset(x.support())
        else:
            try:
                M, G = max_schreier_sum(x, t, max_states=max_states)
            except SearchTooLarge:
                M, G = None, None
        if M is not None and M / (1 << t) > lower:
            lower = M / (1 << t)
            witness = schreier_indicator_term(sorted(G), t, signs)
        if M == total:
            upper += 2 * weight * total
            break
        upper += weight * (total if M is None else M)
        weight /= 2
    else:
        upper += 2 * weight * total
    upper = max(upper, x.sup_norm())
    return TsirelsonBounds(lower, upper, witness, lower == upper)


def schreier_indicator_term(G: list[int], level: int, signs: dict[int, int]) -> Term:
    """The W_T functional 2^{-level} Σ_{k∈G} ±e*_k, following G's decomposition."""
    w = schreier.is_member(G, level)
    if w is None:
        raise ValueError("set is not in the requested Schreier family")

    def build(node) -> Term:
        if node.level == 0:
            k = node.elements[0]
            return Unit(k, signs.get(k, 1))
        return HalfSum(tuple(build(c) for c in node.children))

    return build(w)


def tsirelson_bounds(v: RationalVector, exact_cap: int = EXACT_CAP) -> TsirelsonBounds:
    """Exact value when the support is small, Schreier-layer bounds otherwise."""
    if len(v) <= exact_cap:
        value, wit = tsirelson_norm(v)
        return TsirelsonBounds(value, value, wit.term, True)
    return schreier_layer_bounds(v)
