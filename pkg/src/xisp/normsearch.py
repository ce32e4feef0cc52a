"""Certified two-sided estimates of the norm, tree analyses and the basic inequality.

The norm of a vector v is the supremum of f(v) over the norming set W.  A
certificate pairs a concrete term of W (so f(v) is a lower bound) with an upper
bound coming from one of three dominations: W sits inside the Tsirelson norming
set, block combinations are dominated by 6·‖Σ c_k e_φ(k)‖_T, and the ℓ_1 mass.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from . import schreier
from .config import SpaceConfig
from .functionals import (
    ZERO, AlphaAverage, BetaAverage, Convex, HalfSum, Restricted, Term, TypeIAlpha,
    TypeIBeta, TypeII, Unit, _Averaging, _Halving, _Weighted, average_size, core,
    evaluate, term_to_json, validate, weight, weight_set,
)
from .tsirelson import tsirelson_bounds
from .vectors import BlockSequence, IndexInterval, RationalVector

START_POINTS = 64
TYPE_TWO_NOTE = "type II lower bounds range over registry-coherent special sequences only"


class CertificateError(AssertionError):
    """An emitted certificate failed its own soundness check (an implementation bug)."""


class ConstructionInvariantViolated(AssertionError):
    pass


class MalformedInstance(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    depth: int = 6
    children: int = 8
    sizes: int = 64

    @classmethod
    def parse(cls, text: str) -> Budget:
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 3 or min(parts) < 1:
            raise ValueError("budget must be three positive integers 'depth,children,sizes'")
        return cls(*parts)

    def __str__(self):
        return f"{self.depth},{self.children},{self.sizes}"

    def __le__(self, other: Budget) -> bool:
        return self.depth <= other.depth and self.children <= other.children and self.sizes <= other.sizes


@dataclass(frozen=True)
class NormCertificate:
    vector: RationalVector
    lower: Fraction
    witness: Term
    upper: Fraction
    provenance: str
    mode: str
    budget: Budget
    notes: tuple[str, ...] = ()
    upper_candidates: tuple[tuple[str, Fraction], ...] = ()

    def check(self) -> None:
        if evaluate(self.witness, self.vector) != self.lower:
            raise CertificateError("witness does not evaluate to the lower bound")
        if not self.lower <= self.upper:
            raise CertificateError("lower bound exceeds upper bound")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self, cfg: SpaceConfig | None = None) -> dict:
        out = {
            "vector": self.vector.to_json(),
            "lower": str(self.lower),
            "upper": str(self.upper),
            "provenance": self.provenance,
            "upper_candidates": {name: str(val) for name, val in self.upper_candidates},
            "witness": term_to_json(self.witness),
            "mode": self.mode,
            "budget": str(self.budget),
            "notes": list(self.notes),
        }
        if cfg is not None:
            out["config"] = cfg.to_json()
        return out


# Every certificate created in this process, for after-the-fact audits.
CERTIFICATE_LOG: list[NormCertificate] = []
_log_lock = threading.Lock()


def _emit(cert: NormCertificate) -> NormCertificate:
    cert.check()
    with _log_lock:
        CERTIFICATE_LOG.append(cert)
    return cert


@dataclass(frozen=True)
class BlockPresentation:
    """v = Σ c_k x_k over a block sequence with certified norm bounds ‖x_k‖ ≤ u_k."""

    coeffs: tuple[Fraction, ...]
    blocks: BlockSequence
    block_uppers: tuple[Fraction, ...]

    def vector(self) -> RationalVector:
        return self.blocks.combine(self.coeffs)


def block_domination_bound(p: BlockPresentation) -> tuple[Fraction, bool]:
    """6·‖Σ c_k u_k e_φ(k)‖_T (an upper bound when exactness fails), and whether it is exact."""
    phi = p.blocks.phi
    shifted = RationalVector({f: Fraction(c) * u for f, c, u in zip(phi, p.coeffs, p.block_uppers)})
    b = tsirelson_bounds(shifted)
    return 6 * b.upper, b.exact


# -- lower bounds --------------------------------------------------------------

def best_alpha_family(v: RationalVector, level: int, budget: Budget, cfg: SpaceConfig,
                      min_size: int = 1) -> tuple[Fraction, list[Term]]:
    """Largest Σ_q α_q(v) over very fast growing S_level-admissible window families.

    The search space: at most ``children`` averages; each covers a window of
    consecutive support points, has the least size the growth rule permits
    (at least ``min_size`` and at most ``sizes``) and uses at most s of the
    window's points, with signs matching v.  On long supports windows start only
    at every ceil(N / START_POINTS)-th point.  Within that space the search is
    exhaustive (memoised), so enlarging the budget only adds options.
    """
    pts = [k for k, _ in v.items()]
    signs = [1 if c > 0 else -1 for _, c in v.items()]
    N = len(pts)
    if N == 0:
        return Fraction(0), []
    den = 1
    for _, c in v.items():
        den = lcm(den, c.denominator)
    scale = den * lcm(*range(1, budget.sizes + 1))
    prefix = [0]
    for _, c in v.items():
        prefix.append(prefix[-1] + int(abs(c) * scale))
    stride = max(1, -(-N // START_POINTS))
    memo: dict = {}

    def go(p, q, prev_size, caps):
        """Best scaled total of further averages starting at position >= p."""
        if q >= budget.children or p >= N:
            return 0, None
        key = (p, q, prev_size, caps)
        hit = memo.get(key)
        if hit is not None:
            return hit
        s = min_size if q == 0 else max(prev_size + 1, cfg.vfg_floor(pts[p - 1]) + 1, min_size)
        best = (0, None)
        if s <= budget.sizes:
            first = p if stride == 1 else -(-p // stride) * stride
            for start in range(first, N, stride):
                nxt = schreier.automaton_step(caps, pts[start], level)
                if nxt is False:
                    continue
                end = min(start + s, N)
                here = (prefix[end] - prefix[start]) // s
                rest, tail = go(end, q + 1, s, nxt)
                if here + rest > best[0]:
                    best = (here + rest, ((s, start, end), tail))
        memo[key] = best
        return best

    total, chain = go(0, 0, 0, None)
    family = []
    while chain is not None:
        (s, start, end), chain = chain
        family.append(AlphaAverage(s, tuple(Unit(pts[i], signs[i]) for i in range(start, end))))
    return Fraction(total, scale), family


def _search_type_one(v: RationalVector, budget: Budget, cfg: SpaceConfig):
    """Best type I_α term 2^{-w} Σ α_q over weights w ≤ depth (window families)."""
    best_val, best_term = Fraction(0), None
    for w in range(1, budget.depth + 1):
        total, family = best_alpha_family(v, w, budget, cfg)
        if family and total / (1 << w) > best_val:
            best_val, best_term = total / (1 << w), TypeIAlpha(w, tuple(family))
    return best_val, best_term


def best_interval_restriction(t: Term, v: RationalVector) -> tuple[Fraction, Term | None]:
    """max over intervals E and signs of ±(E t)(v), by a maximum-subarray scan."""
    g = t.vector
    prods = [(k, c * v[k]) for k, c in g.items() if v[k]]
    best = (Fraction(0), None)
    for sign in (1, -1):
        run, start = Fraction(0), None
        for k, p in prods:
            p = sign * p
            if run <= 0:
                run, start = p, k
            else:
                run += p
            if run > best[0]:
                best = (run, Restricted(t, IndexInterval(start, k), sign))
    return best


def _type_two_candidates(registry, cfg: SpaceConfig) -> Iterable[Term]:
    if registry is None:
        return
    for seq in registry.special_sequences():
        terms = [f for f, _ in seq]
        for j in range(1, len(terms) + 1):
            t = TypeII(tuple(terms[:j]))
            if not validate(t, cfg, registry=registry):
                yield t


def norm_certificate(v: RationalVector, budget: Budget | None = None,
                     cfg: SpaceConfig | None = None, registry=None,
                     presentation: BlockPresentation | None = None,
                     hints: Sequence[Term] = ()) -> NormCertificate:
    """Certified interval [lower, upper] containing the norm of v."""
    budget = budget or Budget()
    cfg = cfg or SpaceConfig()
    notes = [TYPE_TWO_NOTE]

    lower, witness = Fraction(0), ZERO
    if v:
        k, c = max(v.items(), key=lambda kc: (abs(kc[1]), -kc[0]))
        lower, witness = abs(c), Unit(k, 1 if c > 0 else -1)

    val, term = _search_type_one(v, budget, cfg)
    if term is not None and val > lower:
        lower, witness = val, term

    candidates = list(_type_two_candidates(registry, cfg))
    for h in hints:
        problems = validate(h, cfg, registry=registry)
        if problems:
            notes.append(f"hint rejected: {problems[0]}")
            continue
        candidates.append(h)
    for t in candidates:
        val, restricted = best_interval_restriction(t, v)
        if restricted is not None and val > lower:
            lower, witness = val, restricted

    uppers = [("tsirelson-domination", tsirelson_bounds(v).upper)]
    if presentation is not None:
        if presentation.vector() != v:
            raise ValueError("block presentation does not add up to the vector")
        uppers.append(("block-domination", block_domination_bound(presentation)[0]))
    uppers.append(("ell1", v.l1_norm()))
    provenance, upper = min(uppers, key=lambda nu: nu[1])

    return _emit(NormCertificate(v, lower, witness, upper, provenance, cfg.mode, budget,
                                 tuple(notes), tuple(uppers)))


def certificate_from_witness(v: RationalVector, witness: Term, cfg: SpaceConfig,
                             registry=None, presentation: BlockPresentation | None = None,
                             budget: Budget | None = None) -> NormCertificate:
    """A certificate whose lower bound is a given (validated) functional's value."""
    problems = validate(witness, cfg, registry=registry)
    if problems:
        raise ValueError(f"witness is not in W: {problems[0]}")
    base = norm_certificate(v, budget or Budget(1, 1, 1), cfg, presentation=presentation)
    return _emit(NormCertificate(v, evaluate(witness, v), witness, base.upper, base.provenance, cfg.mode,
                                 base.budget, base.notes, base.upper_candidates))


# -- tree analysis -------------------------------------------------------------

def tsirelson_analysis(t: Term) -> list[Term]:
    """Split a type I term of weight n into g_i = 2^{-(n-1)} Σ_{j∈F_i} f_j with f = ½ Σ g_i.

    The F_i are the greedy maximal S_{n-1} pieces of the children's minimal
    supports; because those form an S_n set there are at most min supp f_1 pieces.
    """
    if not isinstance(t, _Weighted):
        raise TypeError("Tsirelson analyses exist for type I terms only")
    n, items = t.weight, t.items
    if n < 1:
        raise ValueError("weight must be at least 1")
    if n == 1:
        return list(items)
    mins = [f.min_support for f in items]
    pieces = schreier.greedy_pieces(mins, n - 1)
    out, pos = [], 0
    for piece in pieces:
        out.append(type(t)(n - 1, items[pos:pos + len(piece)]))
        pos += len(piece)
    return out


@dataclass(frozen=True)
class TreeNode:
    term: Term
    kind: str                      # leaf | zero | convex | half
    children: tuple[TreeNode, ...] = ()
    weights: tuple[Fraction, ...] = ()

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)


def _wrap(t: Term, wheres: list, sign: int) -> Term:
    for w in wheres:
        t = Restricted(t, w)
    return Restricted(t, IndexInterval.full(), -1) if sign < 0 else t


def _expand(t: Term, wheres: list, sign: int):
    """(kind, weights, child terms) for t seen through restrictions and a sign."""
    if isinstance(t, Restricted):
        return _expand(t.item, wheres + [t.where], sign * t.sign)
    if isinstance(t, Unit):
        return "leaf", (), ()
    if isinstance(t, Convex):
        return "convex", t.weights, tuple(_wrap(f, wheres, sign) for f in t.items)
    if isinstance(t, _Averaging):
        ws = [Fraction(1, t.size)] * len(t.items)
        kids = [_wrap(f, wheres, sign) for f in t.items]
        if len(kids) < t.size:
            ws.append(1 - sum(ws))
            kids.append(ZERO)
        return "convex", tuple(ws), tuple(kids)
    if isinstance(t, _Weighted):
        return "half", (), tuple(_wrap(g, wheres, sign) for g in tsirelson_analysis(t))
    if isinstance(t, _Halving):
        return "half", (), tuple(_wrap(f, wheres, sign) for f in t.items)
    raise TypeError(f"unknown term {type(t).__name__}")


def tree_analysis(t: Term) -> TreeNode:
    """Expand t into its tree analysis; restrictions are pushed to the children."""
    if t.is_zero:
        return TreeNode(t, "zero")
    kind, weights, kids = _expand(t, [], 1)
    if kind == "leaf":
        return TreeNode(t, "leaf")
    if kind == "half":
        kids = tuple(k for k in kids if not k.is_zero)
    return TreeNode(t, kind, tuple(tree_analysis(k) for k in kids), weights)


# -- the basic inequality -----------------------------------------------------

def _range(vec: RationalVector):
    return (vec.min_support, vec.max_support) if vec else None


def _meets(a, b) -> bool:
    return a is not None and b is not None and a[0] <= b[1] and b[0] <= a[1]


def basic_inequality_witness(f: Term, blocks: BlockSequence, cfg: SpaceConfig | None = None,
                             registry=None, block_uppers: Sequence[Fraction] | None = None,
                             check_input: bool = True) -> Term:
    """g in the |||·||| norming set with 2 g(e_φ(k)) ≥ f(x_k) for every block x_k.

    The blocks must carry norm bounds ‖x_k‖ ≤ 1 (``block_uppers``; by default the
    ℓ_1 mass is used).  All postconditions are verified exactly.
    """
    cfg = cfg or SpaceConfig()
    blocks = blocks if isinstance(blocks, BlockSequence) else BlockSequence(tuple(blocks))
    xs = blocks.blocks
    uppers = list(block_uppers) if block_uppers is not None else [x.l1_norm() for x in xs]
    if len(uppers) != len(xs) or any(u > 1 for u in uppers):
        raise ValueError("every block needs a certified norm bound of at most 1")
    if check_input:
        problems = validate(f, cfg, registry=registry)
        if problems:
            raise ValueError(f"functional is not in W: {problems[0]}")
    phi = blocks.phi
    ranges = [_range(x) for x in xs]

    def meeting(vec: RationalVector) -> list[int]:
        r = _range(vec)
        return [k for k, rk in enumerate(ranges) if _meets(r, rk)]

    def build(node: TreeNode) -> Term:
        if node.kind == "zero":
            return ZERO
        if node.kind == "leaf":
            hit = meeting(node.term.vector)
            return Unit(phi[hit[0]]) if hit else ZERO
        if node.kind == "convex":
            return Convex(node.weights, tuple(build(c) for c in node.children))
        # halving node: the G_1 / G_2 split
        kids = node.children
        kid_ranges = [_range(c.term.vector) for c in kids]
        G = meeting(node.term.vector)
        pieces: list[Term] = []
        single: dict[int, list[int]] = {j: [] for j in range(len(kids))}
        for k in G:
            js = [j for j, r in enumerate(kid_ranges) if _meets(r, ranges[k])]
            if len(js) >= 2:
                pieces.append(Unit(phi[k]))
            elif js:
                single[js[0]].append(k)
        for j, ks in single.items():
            if not ks:
                continue
            g = Restricted(build(kids[j]), frozenset(phi[k] for k in ks))
            if not g.is_zero:
                pieces.append(g)
        pieces.sort(key=lambda p: p.min_support)
        return HalfSum(tuple(pieces)) if pieces else ZERO

    g = build(tree_analysis(f))

    problems = validate(g, cfg, grammar="W_|||")
    if problems:
        raise ConstructionInvariantViolated(f"witness outside the |||·||| norming set: {problems[0]}")
    allowed = {phi[k] for k in meeting(f.vector)}
    if not set(g.vector.support()) <= allowed:
        raise ConstructionInvariantViolated("witness support exceeds the blocks meeting ran f")
    for k, x in enumerate(xs):
        if 2 * g.vector[phi[k]] < evaluate(f, x):
            raise ConstructionInvariantViolated(f"2 g(e_φ({k})) < f(x_{k})")
    return g


# -- inequality harness --------------------------------------------------------

@dataclass(frozen=True)
class HarnessReport:
    case: str
    n: int
    C: Fraction
    lhs: Fraction
    rhs: Fraction
    holds: bool
    hypotheses_faithful: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"case": self.case, "n": self.n, "C": str(self.C), "lhs": str(self.lhs),
                "rhs": str(self.rhs), "holds": self.holds,
                "hypotheses_faithful": self.hypotheses_faithful, "detail": self.detail}


HARNESS_CASES = (
    "average-on-vector",
    "vfg-family-on-vector",
    "low-weight-type-one",
    "beta-family-on-exact-vector",
    "type-two-on-exact-vector",
)


def _meeting_blocks(t: Term, blocks) -> list[int]:
    r = _range(t.vector)
    return [k for k, x in enumerate(blocks) if _meets(r, _range(x))]


def _check_family(family, cls, j: int, cfg: SpaceConfig, registry):
    """A very fast growing S_j-admissible family validates exactly as a type I term would."""
    problems = validate(cls(j, tuple(family)), cfg, registry=registry)
    if problems:
        raise MalformedInstance(f"family is not very fast growing and S_{j}-admissible: {problems[0]}")


def inequality_harness(case: str, record, family: Sequence[Term] | Term, cfg: SpaceConfig | None = None,
                       registry=None, admissibility: int | None = None) -> HarnessReport:
    """Evaluate one inequality exactly on a constructed vector.

    ``record`` needs attributes ``x``, ``n``, ``C``, ``blocks`` (list of vectors),
    ``coeffs`` (aligned with the blocks), and ``hypotheses_faithful``.
    """
    cfg = cfg or SpaceConfig()
    x, n, C = record.x, record.n, Fraction(record.C)
    blocks, coeffs = list(record.blocks), [Fraction(c) for c in record.coeffs]
    faithful = bool(record.hypotheses_faithful)
    fam = [family] if isinstance(family, Term) else list(family)
    if not fam:
        raise MalformedInstance("empty family")

    if case == "average-on-vector":
        (a,) = fam
        if not isinstance(core(a), AlphaAverage):
            raise MalformedInstance("expected an α-average")
        if validate(a, cfg, registry=registry):
            raise MalformedInstance("α-average is not in W")
        s = average_size(a)
        G = _meeting_blocks(a, blocks)
        lhs = abs(evaluate(a, x))
        if not G:
            return HarnessReport(case, n, C, lhs, Fraction(0), lhs == 0, faithful, "range misses x")
        mass = sum(coeffs[k] for k in G)
        rhs = min(C * (1 << n) / s * mass, 6 * C / s * mass + Fraction(1, 3 * (1 << (2 * n)))) \
            + 2 * C * (1 << n) * max(coeffs[k] for k in G)
        return HarnessReport(case, n, C, lhs, rhs, lhs < rhs, faithful)

    if case == "vfg-family-on-vector":
        j = admissibility if admissibility is not None else n - 1
        if not j < n:
            raise MalformedInstance("admissibility level must be below n")
        if any(not isinstance(core(a), AlphaAverage) for a in fam):
            raise MalformedInstance("expected α-averages")
        if j >= 1:
            _check_family(fam, TypeIAlpha, j, cfg, registry)
        elif len(fam) != 1 or validate(fam[0], cfg, registry=registry):
            raise MalformedInstance("an S_0-admissible family is a single average of W")
        lhs = sum((abs(evaluate(a, x)) for a in fam), Fraction(0))
        rhs = 6 * C / average_size(fam[0]) + Fraction(1, 1 << n)
        return HarnessReport(case, n, C, lhs, rhs, lhs < rhs, faithful, f"S_{j}, {len(fam)} averages")

    if case == "low-weight-type-one":
        (f,) = fam
        if not isinstance(core(f), TypeIAlpha):
            raise MalformedInstance("expected a type I_α functional")
        j = weight(f)
        if not j < n:
            raise MalformedInstance("weight must be below n")
        if validate(f, cfg, registry=registry):
            raise MalformedInstance("functional is not in W")
        lhs = abs(evaluate(f, x))
        rhs = 7 * C / (1 << j)
        return HarnessReport(case, n, C, lhs, rhs, lhs < rhs, faithful, f"weight {j}")

    if case == "beta-family-on-exact-vector":
        if n < 4:
            raise MalformedInstance("needs n >= 4")
        j = admissibility if admissibility is not None else n - 3
        if not 1 <= j <= n - 3:
            raise MalformedInstance("admissibility level must lie in [1, n-3]")
        if any(not isinstance(core(b), BetaAverage) for b in fam):
            raise MalformedInstance("expected β-averages")
        _check_family(fam, TypeIBeta, j, cfg, registry)
        lhs = sum((abs(evaluate(b, x)) for b in fam), Fraction(0))
        rhs = sum((8 * C / average_size(b) for b in fam), Fraction(0)) + Fraction(1, 1 << n)
        return HarnessReport(case, n, C, lhs, rhs, lhs < rhs, faithful, f"S_{j}, {len(fam)} averages")

    if case == "type-two-on-exact-vector":
        (f,) = fam
        if n < 3:
            raise MalformedInstance("needs n >= 3")
        if not isinstance(core(f), TypeII):
            raise MalformedInstance("expected a type II functional")
        if validate(f, cfg, registry=registry):
            raise MalformedInstance("functional is not in W")
        ws = weight_set(f)
        if any(n <= w <= 1 << (2 * n) for w in ws):
            raise MalformedInstance("weight set meets {n, ..., 2^{2n}}")
        lhs = abs(evaluate(f, x))
        low = [weight(g) for g in core(f).items if weight(g) < n]
        rhs = C / (1 << n) + C / (1 << (2 * n)) + sum((4 * C / (1 << w) for w in low), Fraction(0))
        return HarnessReport(case, n, C, lhs, rhs, lhs < rhs, faithful)

    raise MalformedInstance(f"unknown harness case {case!r}")

