"""Acceptance suites shared by the command line and the test-suite.

Each suite returns a SuiteResult whose JSON form is deterministic for a given
seed (timings are checked but not reported as numbers).
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from . import schreier
from .config import InfeasibleAtBudget, SpaceConfig
from .constructions import (
    build_c_theta_vector, build_dependent_sequence, build_exact_vector, hi_demo, zero_dependent_report,
)
from .corpus import random_blocks, random_term, random_vector
from .functionals import AlphaAverage, CodingRegistry, TypeIAlpha, TypeII, Unit, evaluate, validate
from .normsearch import (
    CERTIFICATE_LOG, BlockPresentation, Budget, MalformedInstance, basic_inequality_witness,
    inequality_harness, norm_certificate,
)
from .oracles import in_schreier_by_definition, max_sum_by_enumeration
from .scc import generate_basic_scc, lift_scc, restriction_bound_check
from .tsirelson import brute_force_tsirelson, modified_norm, tsirelson_value
from .vectors import BlockSequence, RationalVector

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    name: str
    claim: str
    passed: bool
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"suite": self.name, "claim": self.claim, "passed": self.passed,
                "lines": self.lines, "data": self.data}


def _vec(rng, max_support, hi, bound=3):
    return random_vector(rng, max_support, 1, hi, bound)


# 1 ------------------------------------------------------------------------------

def tsirelson_oracle(seed: int = DEFAULT_SEED, count: int = 200, time_limit: float = 60.0) -> SuiteResult:
    rng = random.Random(seed)
    t0 = time.perf_counter()
    bad = []
    for i in range(count):
        v = _vec(rng, 8, 20)
        a, b = tsirelson_value(v), brute_force_tsirelson(v)
        if a != b:
            bad.append(f"vector {i}: dynamic programme {a} != enumeration {b}")
    fast = time.perf_counter() - t0 < time_limit
    if not fast:
        bad.append(f"runtime exceeded {time_limit} s")
    return SuiteResult("tsirelson-oracle",
                       "exact Tsirelson norm equals the enumeration oracle on random vectors",
                       not bad, bad or [f"{count} vectors agree; runtime within {time_limit:g} s"],
                       {"vectors": count, "mismatches": len(bad), "within_time": fast})


# 2 ------------------------------------------------------------------------------

def three_bar_sandwich(seed: int = DEFAULT_SEED, count: int = 100) -> SuiteResult:
    rng = random.Random(seed + 2)
    bad = []
    for i in range(count):
        v = _vec(rng, 12, 30)
        t, m = tsirelson_value(v), modified_norm(v)
        if not t <= m <= 3 * t:
            bad.append(f"vector {i}: ‖v‖_T = {t}, |||v||| = {m}")
    return SuiteResult("three-bar-sandwich", "‖v‖_T ≤ |||v||| ≤ 3‖v‖_T", not bad,
                       bad or [f"{count} vectors satisfy the sandwich"], {"vectors": count})


# 3 ------------------------------------------------------------------------------

def schreier_oracle(seed: int = DEFAULT_SEED, universe: int = 14, max_level: int = 3,
                    weight_maps: int = 100) -> SuiteResult:
    bad = []
    checked = 0
    for r in range(universe + 1):
        for F in combinations(range(1, universe + 1), r):
            for n in range(max_level + 1):
                checked += 1
                if schreier.member(F, n) != in_schreier_by_definition(F, n):
                    bad.append(f"membership of {F} in S_{n}")
                w = schreier.is_member(F, n)
                if (w is not None) != schreier.member(F, n) or (w is not None and not schreier.check_witness(w)):
                    bad.append(f"witness for {F} in S_{n}")
    rng = random.Random(seed + 3)
    for i in range(weight_maps):
        keys = rng.sample(range(1, 25), rng.randint(1, 10))
        weights = {k: Fraction(rng.randint(0, 12), rng.randint(1, 4)) for k in keys}
        n = rng.randint(0, max_level)
        val, G = schreier.max_schreier_sum(weights, n)
        want = max_sum_by_enumeration(weights, n)
        if val != want or not schreier.member(G, n) or sum((weights[k] for k in G), Fraction(0)) != val:
            bad.append(f"weight map {i}, level {n}: {val} != {want}")
    return SuiteResult("schreier-oracle",
                       "membership and maximal sums agree with the recursive definition",
                       not bad, bad[:20] or [f"{checked} membership queries and {weight_maps} weight maps agree"],
                       {"membership_queries": checked, "weight_maps": weight_maps, "failures": len(bad)})


# 4 ------------------------------------------------------------------------------

def restriction_bound(seed: int = DEFAULT_SEED, levels=(1, 2, 3),
                      tolerances=(Fraction(1, 4), Fraction(1, 8)), subsets: int = 50) -> SuiteResult:
    rng = random.Random(seed + 4)
    lines, data, ok = [], [], True
    for n in levels:
        for eps in tolerances:
            try:
                d = generate_basic_scc(n, eps)
            except InfeasibleAtBudget as exc:
                ok = False
                lines.append(f"n={n} eps={eps}: cannot generate ({exc})")
                data.append({"n": n, "eps": str(eps), "status": "infeasible", "estimate": exc.estimate})
                continue
            F = d.support
            Gs = [F] + [[k for k in F if rng.random() < rng.random()] for _ in range(subsets)]
            failures = 0
            for G in Gs:
                chk = restriction_bound_check(d, G)
                if not chk.holds:
                    failures += 1
            ok &= failures == 0
            lines.append(f"n={n} eps={eps}: support {len(F)}, {len(Gs)} subsets, {failures} failures")
            data.append({"n": n, "eps": str(eps), "support": len(F), "subsets": len(Gs),
                         "failures": failures, "status": "checked"})
    return SuiteResult("restriction-bound",
                       "‖x restricted to G‖_T ≤ 2^{-n} Σ_G c_k + ε for basic special convex combinations",
                       ok, lines, {"cases": data})


# 5 ------------------------------------------------------------------------------

def basic_inequality(seed: int = DEFAULT_SEED, count: int = 100) -> SuiteResult:
    rng = random.Random(seed + 5)
    cfg = SpaceConfig()
    bad = []
    for i in range(count):
        xs = random_blocks(rng, rng.randint(1, 5), start=rng.randint(1, 6))
        hi = xs.blocks[-1].max_support + 2
        f = random_term(rng, 1, hi, 4, cfg)
        try:
            g = basic_inequality_witness(f, xs, cfg)
        except AssertionError as exc:
            bad.append(f"instance {i}: {exc}")
            continue
        if validate(g, cfg, grammar="W_|||"):
            bad.append(f"instance {i}: witness invalid")
        for k, x in enumerate(xs):
            if 2 * g.vector[x.max_support] < evaluate(f, x):
                bad.append(f"instance {i}: block {k} violates 2g(e_φ(k)) ≥ f(x_k)")
    return SuiteResult("basic-inequality",
                       "the constructed witness lies in the |||·||| norming set and dominates f on each block",
                       not bad, bad or [f"{count} random instances verified exactly"], {"instances": count})


# 6 ------------------------------------------------------------------------------

_SPACED = ({0: Fraction(1), 1: Fraction(-1, 2)}, {0: Fraction(1, 2), 1: Fraction(1)})


def _scc_variants(n: int, eps: Fraction, rng: random.Random):
    """Five (start, spacing, shape, signs) choices; two-point blocks need spaced positions,
    which the (2, 1/8) case cannot afford, so it varies start and signs instead."""
    lead = eps.denominator + 1
    plus = {0: Fraction(1)}
    out = [(lead, 1, plus, "plus"), (lead, 1, plus, "alternating"), (lead + 1, 1, plus, "random")]
    if n == 1 or eps >= Fraction(1, 4):
        out += [(2, 2, shape, "plus") for shape in _SPACED]
    else:
        out += [(lead + 2, 1, plus, "plus"), (lead + 3, 1, plus, "alternating")]
    return out


def _sign(pattern: str, k: int, rng: random.Random) -> int:
    if pattern == "alternating":
        return -1 if k % 2 else 1
    if pattern == "random":
        return rng.choice((1, -1))
    return 1


def scc_upper_certificates(seed: int = DEFAULT_SEED) -> SuiteResult:
    cfg = SpaceConfig()
    rng = random.Random(seed + 6)
    lines, ok, rows = [], True, []
    combos = [(1, Fraction(1, 4)), (1, Fraction(1, 8)), (2, Fraction(1, 4)), (2, Fraction(1, 8))]
    for n, eps in combos:
        for variant, (start, spacing, shape, signs) in enumerate(_scc_variants(n, eps, rng)):
            d = generate_basic_scc(n, eps, (start + spacing * i for i in itertools.count()))
            blocks = []
            for k, p in enumerate(d.support):
                sg = _sign(signs, k, rng)
                blocks.append(RationalVector({p + off: sg * c for off, c in shape.items()}))
            # ‖·‖ ≤ ‖·‖_T, and the unit functional at ψ gives ‖x_k‖ ≥ 1
            uppers = [tsirelson_value(b) for b in blocks]
            normalized = all(u == 1 for u in uppers)
            coeffs = tuple(d.coeffs[p] for p in d.support)
            bs = BlockSequence(tuple(blocks))
            x = lift_scc(bs, d)
            pres = BlockPresentation(coeffs, bs, tuple(uppers))
            cert = norm_certificate(x, Budget(), cfg, presentation=pres)
            bound = Fraction(6, 1 << n) + 12 * eps
            good = normalized and cert.upper <= bound
            ok &= good
            rows.append({"n": n, "eps": str(eps), "variant": variant, "blocks": len(blocks),
                         "upper": str(cert.upper), "bound": str(bound), "provenance": cert.provenance,
                         "holds": good})
            lines.append(f"n={n} eps={eps} variant {variant}: {len(blocks)} blocks, upper {cert.upper} "
                         f"({cert.provenance}) vs {bound}: {'ok' if good else 'FAIL'}")
    return SuiteResult("scc-upper-certificates",
                       "lifted special convex combinations of normalized blocks have upper ≤ 6/2^n + 12ε",
                       ok, lines, {"cases": rows})


# 7 ------------------------------------------------------------------------------

def _harness_families(rec, rng: random.Random, cfg: SpaceConfig, count: int = 12):
    """α-averages aimed at x: window averages matching signs, and random ones."""
    x = rec.x
    pts = x.support()
    out = []
    for _ in range(count // 2):
        s = rng.choice([1, 2, 3, 5, 8, 17, 64, len(pts), 2 * len(pts)])
        a = rng.randrange(len(pts))
        window = pts[a:a + min(s, 6)]
        out.append(AlphaAverage(s, tuple(Unit(k, 1 if x[k] > 0 else -1) for k in window)))
    for _ in range(count - count // 2):
        lo = rng.randint(max(1, pts[0] - 5), pts[-1])
        hi = min(lo + rng.randint(0, 40), pts[-1] + 5)
        kids = []
        pos = lo
        for _ in range(rng.randint(1, 4)):
            if pos > hi:
                break
            end = rng.randint(pos, hi)
            t = random_term(rng, pos, end, 3, cfg)
            if t is not None and not t.is_zero:
                kids.append(t)
                pos = t.max_support + 1
        if kids:
            out.append(AlphaAverage(rng.randint(len(kids), len(kids) + 20), tuple(kids)))
    return out


def _harness_on_record(rec, rng, cfg) -> tuple[bool, list[str]]:
    lines, ok = [], True
    fams = _harness_families(rec, rng, cfg)
    for a in fams:
        r = inequality_harness("average-on-vector", rec, a, cfg)
        ok &= r.holds
        if not r.holds:
            lines.append(f"average-on-vector fails: {r.lhs} vs {r.rhs}")
    # S_0-admissible families are single averages; higher j need n ≥ 2
    checked_vfg = 0
    for a in fams:
        r = inequality_harness("vfg-family-on-vector", rec, [a], cfg, admissibility=0)
        checked_vfg += 1
        ok &= r.holds
        if not r.holds:
            lines.append(f"vfg-family-on-vector fails: {r.lhs} vs {r.rhs}")
    # type I_α functionals of weight below n exist only for n ≥ 2
    weights_below = list(range(1, rec.n))
    lines.append(f"{len(fams)} averages, {checked_vfg} families, "
                 f"{len(weights_below)} admissible weights for low-weight-type-one")
    return ok, lines


def inequality_suite(seed: int = DEFAULT_SEED, per_level=((1, 7), (2, 7), (3, 6))) -> SuiteResult:
    """Build (C, θ, n) vectors with every defining clause genuine, then evaluate the inequalities."""
    cfg = SpaceConfig()
    rng = random.Random(seed + 7)
    lines, rows, ok = [], [], True
    variants = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (1, 1), (2, 3)]
    for n, count in per_level:
        for i in range(count):
            C, width = variants[i % len(variants)]
            start = 8 * C * (1 << (2 * n)) + 7 * i
            try:
                rec = build_c_theta_vector(n, C, cfg, start=start, block_width=width)
            except InfeasibleAtBudget as exc:
                ok = False
                rows.append({"n": n, "index": i, "status": "infeasible", "estimate": exc.estimate})
                lines.append(f"n={n} #{i}: no ({C}, θ, {n}) vector at desk scale ({exc.estimate})")
                continue
            good, sub = _harness_on_record(rec, rng, cfg)
            good &= rec.hypotheses_faithful
            ok &= good
            rows.append({"n": n, "index": i, "status": "checked", "C": str(C), "theta": str(rec.theta),
                         "support": len(rec.x), "hypotheses_faithful": rec.hypotheses_faithful,
                         "holds": good})
            lines.append(f"n={n} #{i}: C={C}, θ={rec.theta}, {len(rec.blocks)} blocks: "
                         f"{'ok' if good else 'FAIL'}; " + "; ".join(sub))
    relaxed = _relaxed_inequality_run(rng, cfg)
    lines += [f"informational, relaxed hypotheses: {r}" for r in relaxed]
    return SuiteResult("inequality-harness",
                       "average, very-fast-growing-family and low-weight inequalities on (C, θ, n) vectors",
                       ok, lines, {"vectors": rows, "relaxed_informational": relaxed})


def _relaxed_inequality_run(rng: random.Random, cfg: SpaceConfig, levels=(2, 3)) -> list[str]:
    """Evaluate the same inequalities on relaxed n = 2, 3 vectors; never counted as passing."""
    out = []
    for n in levels:
        rec = build_exact_vector(n, cfg)
        failing = [name for name, status in rec.clauses if status != "holds"]
        reports = []
        for a in _harness_families(rec, rng, cfg):
            reports.append(inequality_harness("average-on-vector", rec, a, cfg))
            reports.append(inequality_harness("vfg-family-on-vector", rec, [a], cfg, admissibility=0))
            low = TypeIAlpha(1, (a,))
            if not validate(low, cfg):
                reports.append(inequality_harness("low-weight-type-one", rec, low, cfg))
        held = sum(r.holds for r in reports)
        out.append(f"n={n}: {held}/{len(reports)} inequalities hold; clauses not met: {', '.join(failing)}")
    return out


# 8 ------------------------------------------------------------------------------

def dependent_sequence(seed: int = DEFAULT_SEED, levels=(2, 3)) -> SuiteResult:
    cfg = SpaceConfig()
    lines, rows, ok = [], [], True
    for n in levels:
        reg = CodingRegistry(cfg)
        demo = hi_demo(n, cfg, reg)
        wit = demo.lower_sum.witness
        valid = not validate(wit, cfg, registry=reg)
        value = evaluate(wit, demo.x + demo.y)
        good = valid and isinstance(wit, TypeII) and value == demo.lower_sum.lower and value >= 1
        ok &= good
        seq0, cert0 = zero_dependent_report(n, cfg, CodingRegistry(cfg))
        rows.append({"n": n, "weights": [str(m) for m in demo.sequence.weights],
                     "lower(1/n Σ x_k)": str(demo.lower_sum.lower), "witness_valid": valid,
                     "sequence_clauses": dict(demo.sequence.clauses),
                     "pairs_faithful": all(p.hypotheses_faithful for p in demo.sequence.pairs),
                     "upper(x-y) bits": demo.upper_difference.upper.numerator.bit_length(),
                     "zero_dependent_upper_bits": cert0.upper.numerator.bit_length(),
                     "zero_dependent_lower_bits": cert0.lower.numerator.bit_length()})
        lines.append(f"n={n}: weights {list(demo.sequence.weights)}, (1/n)‖Σ x_k‖ ≥ {demo.lower_sum.lower} "
                     f"via the type II witness ({'valid' if valid else 'INVALID'}); "
                     f"0-dependent upper report recorded ({cert0.provenance})")
    return SuiteResult("dependent-sequence",
                       "the type II witness certifies (1/n)‖Σ_{k≤2n} x_k‖ ≥ 1",
                       ok, lines, {"levels": rows})


# 9 ------------------------------------------------------------------------------

def certificate_soundness(seed: int = DEFAULT_SEED) -> SuiteResult:
    cfg = SpaceConfig()
    lines, ok = [], True
    if not CERTIFICATE_LOG:
        norm_certificate(RationalVector({1: 1}), Budget(1, 1, 1), cfg)
    bad = 0
    for cert in list(CERTIFICATE_LOG):
        if evaluate(cert.witness, cert.vector) != cert.lower or not cert.lower <= cert.upper:
            bad += 1
    ok &= bad == 0
    lines.append(f"{len(CERTIFICATE_LOG)} certificates audited, {bad} unsound")

    reg = CodingRegistry(cfg)
    seq = build_dependent_sequence(3, 1, cfg, reg)
    saved = reg.dumps()
    reloaded = CodingRegistry.from_json(json.loads(saved))
    replay = CodingRegistry(cfg)
    seq2 = build_dependent_sequence(3, 1, cfg, replay)
    same = (reloaded.dumps() == saved and replay.dumps() == saved and seq.weights == seq2.weights)
    ok &= same
    lines.append(f"registry replay {'reproduces' if same else 'DIFFERS FROM'} the saved bytes "
                 f"({len(reg)} entries, weights {list(seq.weights)})")
    return SuiteResult("certificate-soundness",
                       "every certificate is sound and the coding registry replays byte-for-byte",
                       ok, lines, {"certificates": len(CERTIFICATE_LOG), "unsound": bad, "replay": same})


# 10 -----------------------------------------------------------------------------

BUDGET_CHAIN = (Budget(1, 1, 1), Budget(2, 2, 4), Budget(3, 4, 16), Budget(6, 8, 64))


def fixed_vectors(seed: int = DEFAULT_SEED, count: int = 20) -> list[RationalVector]:
    rng = random.Random(seed + 10)
    out = []
    for i in range(count):
        if i % 4 == 0:
            lo = rng.randint(2, 12)
            out.append(RationalVector({k: 1 for k in range(lo, lo + rng.randint(5, 30))}))
        else:
            out.append(_vec(rng, 20, 50))
    return out


def budget_monotonicity(seed: int = DEFAULT_SEED) -> SuiteResult:
    cfg = SpaceConfig()
    lines, ok = [], True
    improved = 0
    for i, v in enumerate(fixed_vectors(seed)):
        certs = [norm_certificate(v, b, cfg) for b in BUDGET_CHAIN]
        lows = [c.lower for c in certs]
        ups = [c.upper for c in certs]
        good = all(a <= b for a, b in zip(lows, lows[1:])) and all(a >= b for a, b in zip(ups, ups[1:]))
        improved += lows[-1] > lows[0]
        ok &= good
        if not good:
            lines.append(f"vector {i}: lowers {lows}, uppers {ups}")
    lines.append(f"20 vectors over {len(BUDGET_CHAIN)} budgets; the largest budget improved "
                 f"the lower bound on {improved}")
    return SuiteResult("budget-monotonicity", "raising the search budget never worsens either bound",
                       ok, lines, {"vectors": 20, "improved": improved})


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "tsirelson-oracle": tsirelson_oracle,
    "three-bar-sandwich": three_bar_sandwich,
    "schreier-oracle": schreier_oracle,
    "restriction-bound": restriction_bound,
    "basic-inequality": basic_inequality,
    "scc-upper-certificates": scc_upper_certificates,
    "inequality-harness": inequality_suite,
    "dependent-sequence": dependent_sequence,
    "certificate-soundness": certificate_soundness,
    "budget-monotonicity": budget_monotonicity,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(seed)
