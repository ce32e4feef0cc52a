"""Basic special convex combinations: generation, validation and lifting to blocks.

An (n, ε) basic s.c.c. is a convex combination Σ c_k e_k with support F in S_n
such that every subset of F lying in S_{n-1} carries mass below ε.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from . import schreier
from .config import InfeasibleAtBudget
from .schreier import SearchTooLarge, max_schreier_sum
from .tsirelson import tsirelson_bounds
from .vectors import BlockSequence, RationalVector, linear_combination

SUPPORT_LIMIT = 200_000
VALIDATION_STATES = 200_000


class PsiProjectionInvalid(ValueError):
    """The coefficients do not form a basic s.c.c. at the blocks' minimal supports."""


@dataclass(frozen=True)
class SccDescriptor:
    level: int
    eps: Fraction
    coeffs: RationalVector

    @property
    def support(self) -> list[int]:
        return self.coeffs.support()

    def to_json(self) -> dict:
        return {"level": self.level, "eps": str(self.eps), "coeffs": self.coeffs.to_json()}

    @classmethod
    def from_json(cls, data) -> SccDescriptor:
        return cls(int(data["level"]), Fraction(data["eps"]), RationalVector.from_json(data["coeffs"]))


def validate_basic_scc(d: SccDescriptor) -> str | None:
    """None when both clauses hold, otherwise a description of the failed clause."""
    if d.level < 1:
        return "level must be at least 1"
    if not 0 < d.eps:
        return "tolerance must be positive"
    if not d.coeffs:
        return "empty combination"
    if any(c < 0 for _, c in d.coeffs.items()):
        return "(i) negative coefficient"
    if sum((c for _, c in d.coeffs.items()), Fraction(0)) != 1:
        return "(i) coefficients do not sum to 1"
    if not schreier.member(d.support, d.level):
        return f"(i) support not in S_{d.level}"
    if d.eps >= 1:
        # every S_{n-1} subset has mass below 1 unless it is all of F
        if schreier.member(d.support, d.level - 1):
            return f"(ii) the whole support lies in S_{d.level - 1}"
        return None
    try:
        mass, _ = max_schreier_sum(d.coeffs, d.level - 1, max_states=VALIDATION_STATES)
    except SearchTooLarge as exc:
        raise InfeasibleAtBudget("exact check of clause (ii) exceeds the search budget") from exc
    if not mass < d.eps:
        return f"(ii) an S_{d.level - 1} subset carries mass {mass} >= {d.eps}"
    return None


def repeated_average_size(level: int, start: int, limit: int = SUPPORT_LIMIT) -> int | None:
    """Support size of the repeated-averages combination at ``start``; None past ``limit``."""
    if level == 0:
        return 1
    total, pos = 0, start
    for _ in range(start):
        s = repeated_average_size(level - 1, pos, limit - total)
        if s is None:
            return None
        total += s
        pos += s
        if total > limit:
            return None
    return total


def _repeated_average(level: int, stream: Iterator[int], head: list[int], budget: list[int]):
    """Coefficient map of a level-``level`` repeated average drawn from the stream."""
    if level == 0:
        k = head.pop() if head else next(stream)
        budget[0] -= 1
        if budget[0] < 0:
            raise InfeasibleAtBudget("s.c.c. support exceeds the configured limit")
        return {k: Fraction(1)}
    first = _repeated_average(level - 1, stream, head, budget)
    p = min(first)
    parts = [first] + [_repeated_average(level - 1, stream, head, budget) for _ in range(p - 1)]
    out: dict[int, Fraction] = {}
    for part in parts:
        for k, c in part.items():
            out[k] = c / p
    return out


def generate_basic_scc(n: int, eps, M: Iterable[int] | int = 1,
                       limit: int = SUPPORT_LIMIT) -> SccDescriptor:
    """A validated (n, ε) basic s.c.c. built by repeated averages from indices of M.

    ``M`` is either a starting index (meaning M = {start, start+1, ...}) or a
    strictly increasing iterable.  Elements are skipped until the leading index
    exceeds 1/ε; if the result still fails validation the construction moves on.
    """
    eps = Fraction(eps)
    if n < 1:
        raise ValueError("level must be at least 1")
    if not 0 < eps <= 1:
        raise ValueError("tolerance must lie in (0, 1]")
    stream = itertools.count(M) if isinstance(M, int) else iter(M)
    last = 0
    while True:
        lead = next(stream)
        if lead <= last:
            raise ValueError("index stream must be strictly increasing")
        last = lead
        if lead * eps <= 1:
            continue
        if isinstance(M, int):
            size = repeated_average_size(n, lead, limit)
            if size is None:
                raise InfeasibleAtBudget(
                    f"a level-{n} repeated average from index {lead} needs more than {limit} points",
                    estimate=_size_estimate(n, lead),
                )
        coeffs = _repeated_average(n, stream, [lead], [limit])
        d = SccDescriptor(n, eps, RationalVector(coeffs))
        if validate_basic_scc(d) is None:
            return d
        last = d.coeffs.max_support


def _size_estimate(level: int, start: int) -> str:
    # each level-(n-1) piece roughly doubles the running index, so the second
    # piece of a level-n combination already starts past 2^start
    if level <= 1:
        return f"{start} points"
    if level == 2:
        if start <= 40:
            return f"{start * ((1 << start) - 1)} points"
        return f"about {start} * 2^{start} points"
    return f"more than 2^({start} * 2^{start}) points"


def lift_scc(blocks: BlockSequence, d: SccDescriptor) -> RationalVector:
    """Σ c_k x_k where c_k is the coefficient the descriptor puts at ψ(k)."""
    blocks = blocks if isinstance(blocks, BlockSequence) else BlockSequence(tuple(blocks))
    psi = blocks.psi
    if sorted(psi) != d.support:
        raise PsiProjectionInvalid("descriptor support differs from the blocks' minimal supports")
    problem = validate_basic_scc(d)
    if problem is not None:
        raise PsiProjectionInvalid(problem)
    return linear_combination([d.coeffs[k] for k in psi], blocks.blocks)


def descriptor_at(positions: list[int], coeffs, n: int, eps) -> SccDescriptor:
    return SccDescriptor(n, Fraction(eps), RationalVector(dict(zip(positions, coeffs))))


def phi_shift(blocks: BlockSequence, d: SccDescriptor) -> SccDescriptor:
    """Move the coefficient at ψ(k) to φ(k) and double the tolerance."""
    psi, phi = blocks.psi, blocks.phi
    return SccDescriptor(d.level, 2 * d.eps, RationalVector({f: d.coeffs[p] for p, f in zip(psi, phi)}))


@dataclass(frozen=True)
class RestrictionCheck:
    subset: frozenset
    upper: Fraction
    bound: Fraction
    exact: bool

    @property
    def holds(self) -> bool:
        return self.upper <= self.bound


def restriction_bound_check(d: SccDescriptor, G: Iterable[int]) -> RestrictionCheck:
    """Compare a certified upper bound of ‖x restricted to G‖_T with 2^{-n} Σ_G c + ε."""
    G = frozenset(G)
    x = d.coeffs.restrict(G)
    bounds = tsirelson_bounds(x)
    bound = sum((c for _, c in x.items()), Fraction(0)) / (1 << d.level) + d.eps
    return RestrictionCheck(G, bounds.upper, bound, bounds.exact)
