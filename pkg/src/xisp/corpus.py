"""Seeded random instances: vectors, block sequences and valid terms of W."""

from __future__ import annotations

import random
from fractions import Fraction

from .config import SpaceConfig
from .functionals import AlphaAverage, Convex, Restricted, Term, TypeIAlpha, Unit, validate
from .vectors import BlockSequence, IndexInterval, RationalVector


def random_vector(rng: random.Random, max_support: int, lo: int = 1, hi: int = 30,
                  bound: int = 3, denominators: int = 4) -> RationalVector:
    """Support of 1..max_support points in [lo, hi], coefficients in [-bound, bound]."""
    size = rng.randint(1, max_support)
    keys = rng.sample(range(lo, hi + 1), size)
    out = {}
    for k in keys:
        q = rng.randint(1, denominators)
        p = rng.randint(-bound * q, bound * q)
        out[k] = Fraction(p, q) or Fraction(1, q)
    return RationalVector(out)


def random_blocks(rng: random.Random, count: int, start: int = 1, max_width: int = 4,
                  max_gap: int = 2) -> BlockSequence:
    """Successive blocks with ℓ_1 mass at most 1 (hence norm at most 1)."""
    blocks, pos = [], start
    for _ in range(count):
        pos += rng.randint(0, max_gap)
        width = rng.randint(1, max_width)
        raw = {k: Fraction(rng.choice([-3, -2, -1, 1, 2, 3])) for k in range(pos, pos + width)
               if rng.random() < 0.8 or k == pos}
        mass = sum(abs(c) for c in raw.values())
        shrink = Fraction(rng.randint(1, 4), 4)
        blocks.append(RationalVector({k: c / mass * shrink for k, c in raw.items()}))
        pos += width
    return BlockSequence(tuple(blocks))


def _units(rng, lo, hi, count) -> list[Term]:
    if hi < lo:
        return []
    keys = sorted(rng.sample(range(lo, hi + 1), min(count, hi - lo + 1)))
    return [Unit(k, rng.choice([1, -1])) for k in keys]


def _alpha(rng, lo, hi, size, depth, cfg) -> Term | None:
    """An α-average of the given size with up to three successive children in [lo, hi]."""
    if hi < lo:
        return None
    d = min(rng.randint(1, 3), size, hi - lo + 1)
    if depth <= 1 or rng.random() < 0.6:
        kids = _units(rng, lo, hi, d)
    else:
        cuts = sorted(rng.sample(range(lo, hi + 1), min(d, hi - lo + 1)))
        kids = []
        for a, b in zip(cuts, cuts[1:] + [hi + 1]):
            t = random_term(rng, a, b - 1, depth - 1, cfg)
            if t is not None and not t.is_zero:
                kids.append(t)
    return AlphaAverage(size, tuple(kids)) if kids else None


def _type_one(rng, lo, hi, depth, cfg) -> Term | None:
    w = rng.randint(1, 2)
    avgs: list[Term] = []
    pos = lo
    size = rng.randint(1, 2)
    for _ in range(rng.randint(1, 3)):
        if pos > hi:
            break
        room = rng.randint(0, 3)
        a = _alpha(rng, pos, min(hi, pos + room), size, depth - 1, cfg)
        if a is None:
            break
        trial = avgs + [a]
        if validate(TypeIAlpha(w, tuple(trial)), cfg):
            break
        avgs = trial
        pos = a.max_support + 1 + rng.randint(0, 1)
        size = max(size + 1, cfg.vfg_floor(a.max_support) + 1) + rng.randint(0, 1)
    return TypeIAlpha(w, tuple(avgs)) if avgs else None


def random_term(rng: random.Random, lo: int, hi: int, depth: int,
                cfg: SpaceConfig | None = None) -> Term | None:
    """A valid term of W (no type II parts) supported in [lo, hi] of height at most depth."""
    cfg = cfg or SpaceConfig()
    if hi < lo:
        return None
    if depth <= 1:
        return Unit(rng.randint(lo, hi), rng.choice([1, -1]))
    kind = rng.choice(["unit", "alpha", "type1", "type1", "convex", "restrict"])
    if kind == "unit":
        return Unit(rng.randint(lo, hi), rng.choice([1, -1]))
    if kind == "alpha":
        return _alpha(rng, lo, hi, rng.randint(1, 5), depth - 1, cfg) or Unit(lo)
    if kind == "type1":
        return _type_one(rng, lo, hi, depth - 1, cfg) or Unit(hi)
    if kind == "convex":
        a = random_term(rng, lo, hi, depth - 1, cfg)
        b = random_term(rng, lo, hi, depth - 1, cfg)
        c = Fraction(rng.randint(0, 4), 4)
        return Convex((c, 1 - c), (a, b))
    inner = random_term(rng, lo, hi, depth - 1, cfg)
    a = rng.randint(lo, hi)
    b = rng.randint(a, hi)
    return Restricted(inner, IndexInterval(a, b), rng.choice([1, -1]))
