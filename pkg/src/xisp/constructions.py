"""Builders for the finite objects of the HI argument.

(C, θ, n) vectors and exact vectors, exact pairs, dependent sequences, index
witnesses and the HI demonstration pair.  Every record lists the defining
clauses with a status: "holds" (checked exactly), "fails", or "uncertified"
(true in theory but beyond what the certified bounds can show).  Scaled mode
relaxes the tolerance and level of the underlying special convex combination,
and the records say so clause by clause.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .config import InfeasibleAtBudget, SpaceConfig
from .functionals import (
    AlphaAverage, BetaAverage, CodingRegistry, Restricted, Term, TypeIAlpha, TypeII, Unit,
    term_to_json, validate, weight_set,
)
from .normsearch import (
    BlockPresentation, Budget, NormCertificate, best_alpha_family, best_interval_restriction,
    certificate_from_witness, norm_certificate,
)
from .scc import (
    SUPPORT_LIMIT, SccDescriptor, _size_estimate, generate_basic_scc, validate_basic_scc,
)
from .vectors import BlockSequence, RationalVector

HOLDS, FAILS, UNCERTIFIED = "holds", "fails", "uncertified"
DEFAULT_ETA = Fraction(1, 29)


def _status(ok: bool) -> str:
    return HOLDS if ok else FAILS


# -- c_0 blocks ------------------------------------------------------------------

@dataclass(frozen=True)
class C0Blocks:
    blocks: BlockSequence
    witnesses: tuple[Term, ...]


def c0_block_stream(cfg: SpaceConfig, start: int = 1,
                    limit: int = SUPPORT_LIMIT) -> Iterator[tuple[RationalVector, Term]]:
    """Indicator blocks y_k of sets F_k with #F_k ≤ min F_k and growing sizes.

    F_1 = {start}; later sets start after the previous one, at an index no
    smaller than their size, and #F_{k+1} exceeds the growth floor of F_k.
    Each block comes with the uniform average α_k over its points, α_k(y_k) = 1.
    """
    lo, size, used = start, 1, 0
    while True:
        used += size
        if used > limit:
            raise InfeasibleAtBudget(f"c_0 blocks need more than {limit} points",
                                     estimate=f"next block alone has {size} points")
        pts = range(lo, lo + size)
        yield RationalVector({k: 1 for k in pts}), AlphaAverage(size, tuple(Unit(k) for k in pts))
        prev_max = lo + size - 1
        try:
            size = cfg.c0_growth_floor(size, prev_max) + 1
        except InfeasibleAtBudget as exc:
            raise InfeasibleAtBudget("c_0 block sizes outgrow any budget",
                                     estimate=f"more than 2^{prev_max} points") from exc
        if size > limit:
            raise InfeasibleAtBudget(f"c_0 blocks need more than {limit} points",
                                     estimate=f"next block alone has {size} points")
        lo = max(prev_max + 1, size)


def build_c0_blocks(count: int, cfg: SpaceConfig | None = None, start: int = 1,
                    limit: int = SUPPORT_LIMIT) -> C0Blocks:
    cfg = cfg or SpaceConfig()
    stream = c0_block_stream(cfg, start, limit)
    pairs = [next(stream) for _ in range(count)]
    return C0Blocks(BlockSequence(tuple(y for y, _ in pairs)), tuple(a for _, a in pairs))


# -- (C, θ, n) vectors ---------------------------------------------------------------

def vector_tolerance(n: int, C) -> Fraction:
    """The largest tolerance of the form 2/(2m+1) strictly below 1/(36·C·2^{3n})."""
    bound = Fraction(1, 36) / Fraction(C) / (1 << (3 * n))
    eps = 2 / (2 / bound + 1)
    assert eps < bound
    return eps


@dataclass(frozen=True)
class ExactVectorRecord:
    C: Fraction
    theta: Fraction
    n: int
    eps: Fraction
    level: int
    blocks: tuple[RationalVector, ...]
    block_uppers: tuple[Fraction, ...]
    coeffs: tuple[Fraction, ...]
    x: RationalVector
    certificate: NormCertificate
    clauses: tuple[tuple[str, str], ...]
    ladder: tuple[int, ...] | None = None
    companion: Term | None = None
    witnesses: tuple[Term, ...] = ()

    @property
    def hypotheses_faithful(self) -> bool:
        return all(status == HOLDS for _, status in self.clauses)

    def clause(self, name: str) -> str:
        return dict(self.clauses)[name]

    def to_json(self) -> dict:
        out = {
            "C": str(self.C), "theta": str(self.theta), "n": self.n, "eps": str(self.eps),
            "scc_level": self.level,
            "blocks": [b.to_json() for b in self.blocks],
            "block_uppers": [str(u) for u in self.block_uppers],
            "coeffs": [str(c) for c in self.coeffs],
            "x": self.x.to_json(),
            "certificate": self.certificate.to_json(),
            "clauses": dict(self.clauses),
            "hypotheses_faithful": self.hypotheses_faithful,
        }
        if self.ladder is not None:
            out["ladder"] = [str(m) for m in self.ladder]
        if self.companion is not None:
            out["companion"] = term_to_json(self.companion)
        return out


def _uniform_level_one(eps: Fraction, lead: int) -> int:
    """Points needed by a uniform (1, ε) combination: 1/m < ε and m ≤ lead."""
    m = int(1 / eps) + 1
    if m > lead:
        raise ValueError("leading index too small for a uniform level-one combination")
    return m


def _vector_clauses(n, C, eps, level, scc, blocks, uppers, cert, theta) -> list[tuple[str, str]]:
    return [
        ("tolerance below 1/(36 C 2^{3n})", _status(eps < Fraction(1, 36) / C / (1 << (3 * n)))),
        ("special convex combination of level n", _status(level == n and validate_basic_scc(scc) is None)),
        ("block norms at most C", _status(all(u <= C for u in uppers))),
        ("first support at least 8 C 2^{2n}", _status(blocks[0].min_support >= 8 * C * (1 << (2 * n)))),
        ("norm at least theta", _status(theta > 0 and cert.lower >= theta)),
    ]


def _ladder(n: int, blocks: Sequence[RationalVector]) -> tuple[int, ...]:
    """n_1 = 2^{2n} + 1 and n_{k+1} large enough that 2^{-n_{k+1}} maxsupp x_k < 2^{-n_k}."""
    out = [(1 << (2 * n)) + 1]
    for x in blocks[:-1]:
        out.append(out[-1] + x.max_support.bit_length())
    return tuple(out)


def _ladder_clauses(n, C, ladder, blocks) -> list[tuple[str, str]]:
    first = ladder[0] > 1 << (2 * n)
    # 2^{-n_{k+1}} m < 2^{-n_k}  <=>  m < 2^{n_{k+1} - n_k}
    growth = all(x.max_support.bit_length() <= b - a
                 for x, a, b in zip(blocks, ladder, ladder[1:]))
    # |f(x)| ≤ 2^{-w} ℓ_1(x) for every type I_α f of weight w, so ℓ_1 < C suffices
    responses = HOLDS if all(x.l1_norm() < C for x in blocks) else UNCERTIFIED
    return [
        ("ladder starts above 2^{2n}", _status(first)),
        ("ladder growth", _status(growth)),
        ("low-weight responses below C/2^j", responses),
    ]


def build_c_theta_vector(n: int, C=1, cfg: SpaceConfig | None = None, start: int | None = None,
                         block_width: int = 1, exact: bool = False, theta=None,
                         limit: int = SUPPORT_LIMIT) -> ExactVectorRecord:
    """A (C, θ, n) vector over uniform blocks of the given width, all clauses genuine.

    Blocks are (1/w)(e_p + ... + e_{p+w-1}); their ℓ_1 mass 1 bounds their norm.
    θ defaults to the certified lower bound of the assembled vector.  The
    tolerance forces at least 2^{2304}-point supports once n ≥ 2, so those
    requests raise InfeasibleAtBudget.
    """
    cfg = cfg or SpaceConfig()
    C = Fraction(C)
    eps = vector_tolerance(n, C)
    first = 8 * C * (1 << (2 * n))
    start = int(start if start is not None else first)
    if n >= 2:
        lead = int(1 / eps) + 1
        raise InfeasibleAtBudget(
            f"an ({n}, {eps}) special convex combination is far too large",
            estimate=_size_estimate(n, lead))
    positions = (start + block_width * i for i in range(limit))
    d = generate_basic_scc(n, eps, positions, limit=limit)
    psi = d.support
    blocks = tuple(RationalVector({k: Fraction(1, block_width) for k in range(p, p + block_width)})
                   for p in psi)
    coeffs = tuple(d.coeffs[p] for p in psi)
    uppers = tuple(b.l1_norm() for b in blocks)
    bs = BlockSequence(blocks)
    scaled = tuple((1 << n) * c for c in coeffs)
    x = bs.combine(scaled)
    pres = BlockPresentation(scaled, bs, uppers)
    cert = norm_certificate(x, Budget(), cfg, presentation=pres)
    theta = cert.lower if theta is None else Fraction(theta)
    clauses = _vector_clauses(n, C, eps, n, d, blocks, uppers, cert, theta)
    ladder = None
    if exact:
        ladder = _ladder(n, blocks)
        clauses += _ladder_clauses(n, C, ladder, blocks)
    return ExactVectorRecord(C, theta, n, eps, n, blocks, uppers, coeffs, x, cert,
                             tuple(clauses), ladder)


def build_exact_vector(n: int, cfg: SpaceConfig | None = None, start: int = 2,
                       source: Iterator[tuple[RationalVector, Term]] | None = None,
                       limit: int = SUPPORT_LIMIT) -> ExactVectorRecord:
    """x' = 2^n Σ c_k y_k over c_0 blocks with companion f = 2^{-n} Σ α_k, f(x') = 1.

    Faithful mode uses level n and a tolerance below 1/(36·4·2^{3n}) and refuses
    with an estimate when that is out of reach.  Scaled mode uses the configured
    relaxed level and tolerance, and the clause list records what that costs.
    """
    cfg = cfg or SpaceConfig()
    C, theta = Fraction(4), Fraction(1)
    if cfg.faithful:
        level, eps = n, vector_tolerance(n, C)
    else:
        level, eps = min(n, cfg.scaled_scc_level), cfg.scaled_scc_eps
    if level >= 2:
        lead = int(1 / eps) + 1
        if eps < 1:
            raise InfeasibleAtBudget(f"a level-{level} combination with tolerance {eps} is far too large",
                                     estimate=_size_estimate(level, lead))
    stream = source if source is not None else c0_block_stream(cfg, start, limit)
    if level == 1:
        y0, a0 = next(stream)
        try:
            m = _uniform_level_one(eps, y0.min_support)
        except ValueError as exc:
            raise InfeasibleAtBudget("the first block starts too early for the tolerance") from exc
        if m > 40:
            raise InfeasibleAtBudget(f"{m} c_0 blocks of doubling size are needed",
                                     estimate=f"about 2^{m} points")
        pairs = [(y0, a0)] + [next(stream) for _ in range(m - 1)]
        coeffs = tuple(Fraction(1, m) for _ in range(m))
        d = SccDescriptor(1, eps, RationalVector({y.min_support: c for (y, _), c in zip(pairs, coeffs)}))
    else:
        pairs = []
        d = generate_basic_scc(level, eps, (_take(stream, pairs) for _ in iter(int, 1)), limit)
        coeffs = tuple(d.coeffs[y.min_support] for y, _ in pairs if y.min_support in d.coeffs.as_dict())
        pairs = [(y, a) for y, a in pairs if y.min_support in d.coeffs.as_dict()]
    problem = validate_basic_scc(d)
    if problem is not None:
        raise AssertionError(f"generated combination invalid: {problem}")

    blocks = tuple(y for y, _ in pairs)
    alphas = tuple(a for _, a in pairs)
    bs = BlockSequence(blocks)
    scaled = tuple((1 << n) * c for c in coeffs)
    x = bs.combine(scaled)
    companion = TypeIAlpha(n, alphas)
    problems = validate(companion, cfg)
    if problems:
        raise AssertionError(f"companion functional invalid: {problems[0]}")
    uppers = tuple(norm_certificate(y, Budget(1, 1, 1), cfg).upper for y in blocks)
    pres = BlockPresentation(scaled, bs, uppers)
    cert = certificate_from_witness(x, companion, cfg, presentation=pres)
    clauses = _vector_clauses(n, C, eps, level, d, blocks, uppers, cert, theta)
    ladder = _ladder(n, blocks)
    clauses += _ladder_clauses(n, C, ladder, blocks)
    return ExactVectorRecord(C, theta, n, eps, level, blocks, uppers, coeffs, x, cert,
                             tuple(clauses), ladder, companion, alphas)


def _take(stream, sink):
    y, a = next(stream)
    sink.append((y, a))
    return y.min_support


# -- exact pairs and dependent sequences ----------------------------------------------

@dataclass(frozen=True)
class ExactPair:
    n: int
    kind: int
    x: RationalVector
    f: Term
    record: ExactVectorRecord
    certificate: NormCertificate
    clauses: tuple[tuple[str, str], ...]

    @property
    def hypotheses_faithful(self) -> bool:
        return self.record.hypotheses_faithful and all(s == HOLDS for _, s in self.clauses)

    def to_json(self) -> dict:
        return {
            "n": str(self.n), "kind": self.kind, "x": self.x.to_json(), "f": term_to_json(self.f),
            "f(x)": str(self.f(self.x)),
            "certificate": {"lower": str(self.certificate.lower), "upper": str(self.certificate.upper),
                            "provenance": self.certificate.provenance},
            "clauses": dict(self.clauses), "vector_clauses": dict(self.record.clauses),
            "hypotheses_faithful": self.hypotheses_faithful,
        }


def build_exact_pair(n: int, kind: int, cfg: SpaceConfig | None = None, registry=None,
                     start: int = 2, eta: Fraction = DEFAULT_ETA) -> ExactPair:
    """An (n, 1) pair {x'/f(x'), f} or an (n, 0) pair {x', f} with f after x'."""
    cfg = cfg or SpaceConfig()
    if kind not in (0, 1):
        raise ValueError("kind is 0 or 1")
    if n.bit_length() > 24:
        raise InfeasibleAtBudget(f"weight {n} is too large to materialise", estimate=f"2^{n} scale factor")
    stream = c0_block_stream(cfg, start)
    rec = build_exact_vector(n, cfg, source=stream)
    if kind == 1:
        f = rec.companion
        fx = f(rec.x)
        x = rec.x.scale(1 / fx)
        cert = certificate_from_witness(x, f, cfg, registry=registry)
        clauses = [
            ("f(x) = 1", _status(f(x) == 1)),
            ("f(x') close to 1", _status(1 - eta < fx <= 1)),
            ("min supp x <= min supp f", _status(x.min_support <= f.min_support)),
            ("max supp x <= max supp f", _status(x.max_support <= f.max_support)),
            ("norm within [1, 29]", _status(cert.lower >= 1 and cert.upper <= 29)),
        ]
    else:
        x = rec.x
        nxt = x.max_support + 1
        f = TypeIAlpha(n, (AlphaAverage(1, (Unit(nxt),)),))
        cert = norm_certificate(x, Budget(1, 1, 1), cfg)
        clauses = [("f(x) = 0", _status(f(x) == 0))]
    problems = validate(f, cfg, registry=registry)
    clauses.append(("f is a type I_α functional of weight n", _status(not problems)))
    return ExactPair(n, kind, x, f, rec, cert, tuple(clauses))


def first_weight(length: int, cfg: SpaceConfig) -> int:
    """The least m_1 in L_1 with m_1 > 4·length·2^{2·length}."""
    return cfg.next_L1(4 * length * (1 << (2 * length)))


@dataclass(frozen=True)
class DependentSequence:
    kind: int
    pairs: tuple[ExactPair, ...]
    weights: tuple[int, ...]
    functional: Term
    clauses: tuple[tuple[str, str], ...]

    @property
    def xs(self) -> list[RationalVector]:
        return [p.x for p in self.pairs]

    @property
    def fs(self) -> list[Term]:
        return [p.f for p in self.pairs]

    @property
    def hypotheses_faithful(self) -> bool:
        return all(s == HOLDS for _, s in self.clauses) and all(p.hypotheses_faithful for p in self.pairs)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "weights": [str(m) for m in self.weights],
            "pairs": [p.to_json() for p in self.pairs],
            "functional": term_to_json(self.functional),
            "clauses": dict(self.clauses),
            "hypotheses_faithful": self.hypotheses_faithful,
        }


def build_dependent_sequence(length: int, kind: int, cfg: SpaceConfig | None = None,
                             registry: CodingRegistry | None = None,
                             start: int | None = None) -> DependentSequence:
    """Pairs {x_k, f_k} of weights m_1 < m_2 < ... with m_{k+1} = σ(history)."""
    cfg = cfg or SpaceConfig()
    registry = registry if registry is not None else CodingRegistry(cfg)
    if length < 1:
        raise ValueError("length must be positive")
    m1 = first_weight(length, cfg)
    pos = max(start or 2, length, 2)
    pairs: list[ExactPair] = []
    history: list[tuple[Term, int]] = []
    for _ in range(length):
        m = m1 if not history else registry.assign(history)
        pair = build_exact_pair(m, kind, cfg, registry, start=pos)
        pairs.append(pair)
        history.append((pair.f, m))
        pos = pair.f.max_support + 1
    weights = tuple(m for _, m in history)
    functional = TypeII(tuple(p.f for p in pairs))
    problems = validate(functional, cfg, registry=registry)
    ordering = all(a.f.max_support < b.x.min_support for a, b in zip(pairs, pairs[1:]))
    coherent = all(registry.lookup(history[:j]) == history[j][1] for j in range(1, length))
    clauses = (
        ("first weight above 4 n 2^{2n}", _status(weights[0] > 4 * length * (1 << (2 * length))
                                                   and cfg.in_L1(weights[0]))),
        ("f_k ends before x_{k+1}", _status(ordering)),
        ("weights follow the coding function", _status(coherent)),
        ("half-sum is a type II functional", _status(not problems)),
    )
    return DependentSequence(kind, tuple(pairs), weights, functional, clauses)


# -- index witnesses ---------------------------------------------------------------

def alpha_index_witness(xs: Sequence[RationalVector] | BlockSequence, n: int,
                        budget: Budget | None = None, cfg: SpaceConfig | None = None,
                        min_size: int = 1) -> tuple[Fraction, list[Term]]:
    """Best found Σ_q |α_q(x_k)| over very fast growing S_n-admissible families, any k."""
    cfg = cfg or SpaceConfig()
    budget = budget or Budget()
    best: tuple[Fraction, list[Term]] = (Fraction(0), [])
    for x in xs:
        score, fam = best_alpha_family(x, n, budget, cfg, min_size)
        if score > best[0]:
            best = (score, fam)
    return best


def beta_index_witness(xs: Sequence[RationalVector] | BlockSequence, n: int,
                       budget: Budget | None = None, registry: CodingRegistry | None = None,
                       cfg: SpaceConfig | None = None) -> tuple[Fraction, list[Term]]:
    """Best found |β(x_k)| for single β-averages of registry type II functionals.

    For each block the type II candidates (restricted to their best interval) are
    taken greedily by value while their weight sets stay disjoint, at most
    ``children`` of them.
    """
    cfg = cfg or SpaceConfig()
    budget = budget or Budget()
    if registry is None:
        return Fraction(0), []
    seqs = registry.special_sequences()
    cands = []
    for seq in seqs:
        fs = [f for f, _ in seq]
        for j in range(1, len(fs) + 1):
            t = TypeII(tuple(fs[:j]))
            if not validate(t, cfg, registry=registry):
                cands.append(t)
    best: tuple[Fraction, list[Term]] = (Fraction(0), [])
    for x in xs:
        scored = []
        for t in cands:
            val, r = best_interval_restriction(t, x)
            if r is not None:
                scored.append((val, r))
        scored.sort(key=lambda vr: -vr[0])
        chosen, used = [], set()
        for val, r in scored:
            ws = weight_set(r)
            if ws & used or len(chosen) >= budget.children:
                continue
            chosen.append(r)
            used |= ws
        if not chosen:
            continue
        beta = BetaAverage(len(chosen), tuple(chosen))
        if validate(beta, cfg, registry=registry):
            continue
        score = abs(beta(x))
        if score > best[0]:
            best = (score, [beta])
    return best


# -- the HI demonstration -------------------------------------------------------------

@dataclass(frozen=True)
class HiDemo:
    n: int
    x: RationalVector
    y: RationalVector
    sequence: DependentSequence
    lower_sum: NormCertificate
    upper_difference: NormCertificate
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "weights": [str(m) for m in self.sequence.weights],
            "lower(x+y)": str(self.lower_sum.lower),
            "witness": term_to_json(self.lower_sum.witness),
            "upper(x-y)": str(self.upper_difference.upper),
            "upper(x-y) provenance": self.upper_difference.provenance,
            "sequence_clauses": dict(self.sequence.clauses),
            "hypotheses_faithful": self.sequence.hypotheses_faithful,
            "notes": list(self.notes),
        }


def hi_demo(n: int, cfg: SpaceConfig | None = None, registry: CodingRegistry | None = None,
            budget: Budget | None = None) -> HiDemo:
    """x = (1/n) Σ x_{2k-1}, y = (1/n) Σ x_{2k} from a 1-dependent sequence of length 2n."""
    cfg = cfg or SpaceConfig()
    registry = registry if registry is not None else CodingRegistry(cfg)
    seq = build_dependent_sequence(2 * n, 1, cfg, registry)
    xs = seq.xs
    x = _sum(xs[0::2]).scale(Fraction(1, n))
    y = _sum(xs[1::2]).scale(Fraction(1, n))
    lower = certificate_from_witness(x + y, seq.functional, cfg, registry=registry)
    upper = norm_certificate(x - y, budget or Budget(), cfg, registry=registry)
    notes = ("upper bound is the computed value; no constant is claimed",) if not cfg.faithful else ()
    return HiDemo(n, x, y, seq, lower, upper, notes)


def zero_dependent_report(n: int, cfg: SpaceConfig | None = None,
                          registry: CodingRegistry | None = None,
                          budget: Budget | None = None) -> tuple[DependentSequence, NormCertificate]:
    """Certified bounds on (1/n)‖Σ x_k‖ for a 0-dependent sequence of length n."""
    cfg = cfg or SpaceConfig()
    registry = registry if registry is not None else CodingRegistry(cfg)
    seq = build_dependent_sequence(n, 0, cfg, registry)
    v = _sum(seq.xs).scale(Fraction(1, n))
    return seq, norm_certificate(v, budget or Budget(), cfg, registry=registry)


def _sum(vs: Sequence[RationalVector]) -> RationalVector:
    out = RationalVector()
    for v in vs:
        out = out + v
    return out
