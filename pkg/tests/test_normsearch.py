import random
from fractions import Fraction

import pytest

from xisp.config import SpaceConfig
from xisp.corpus import random_blocks, random_term, random_vector
from xisp.functionals import AlphaAverage, TypeIAlpha, Unit, evaluate, validate
from xisp.normsearch import (
    CERTIFICATE_LOG, BlockPresentation, Budget, MalformedInstance, basic_inequality_witness,
    best_alpha_family, best_interval_restriction, certificate_from_witness, inequality_harness,
    norm_certificate, tree_analysis, tsirelson_analysis,
)
from xisp.tsirelson import tsirelson_value
from xisp.vectors import BlockSequence, RationalVector

cfg = SpaceConfig()


def test_budget_parsing_and_order():
    b = Budget.parse("2,3,4")
    assert (b.depth, b.children, b.sizes) == (2, 3, 4)
    assert str(b) == "2,3,4"
    assert Budget(1, 1, 1) <= b
    with pytest.raises(ValueError):
        Budget.parse("1,2")


def test_unit_vector_is_exact():
    cert = norm_certificate(RationalVector({7: 1}), cfg=cfg)
    assert cert.lower == cert.upper == 1
    assert cert.exact


def test_certificates_are_sound_and_logged():
    rng = random.Random(1)
    before = len(CERTIFICATE_LOG)
    for _ in range(30):
        v = random_vector(rng, 10, 1, 40)
        cert = norm_certificate(v, Budget(3, 4, 16), cfg)
        assert evaluate(cert.witness, v) == cert.lower <= cert.upper
        assert not validate(cert.witness, cfg)
        assert cert.upper <= tsirelson_value(v)
    assert len(CERTIFICATE_LOG) >= before + 30


def test_flat_vector_gets_a_type_one_lower_bound():
    v = RationalVector({k: 1 for k in range(4, 20)})
    cert = norm_certificate(v, cfg=cfg)
    assert cert.lower > 1


def test_alpha_family_value_is_attained():
    v = RationalVector({k: Fraction(1, 2) for k in range(3, 30)})
    total, fam = best_alpha_family(v, 2, Budget(), cfg)
    assert total == sum(evaluate(a, v) for a in fam)
    assert not validate(TypeIAlpha(2, tuple(fam)), cfg)


def test_interval_restriction_picks_the_best_window():
    t = AlphaAverage(4, (Unit(1), Unit(2), Unit(3), Unit(4)))
    v = RationalVector({1: -1, 2: 2, 3: 2, 4: -1})
    value, r = best_interval_restriction(t, v)
    assert value == 1
    assert evaluate(r, v) == 1


def test_certificate_from_witness_keeps_the_witness():
    v = RationalVector({3: 1, 4: 1})
    w = AlphaAverage(2, (Unit(3), Unit(4)))
    cert = certificate_from_witness(v, w, cfg)
    assert cert.witness is w and cert.lower == 1


def test_block_presentation_gives_domination_bound():
    blocks = BlockSequence(tuple(RationalVector({k: 1}) for k in range(5, 10)))
    coeffs = (Fraction(1, 5),) * 5
    pres = BlockPresentation(coeffs, blocks, (Fraction(1),) * 5)
    cert = norm_certificate(pres.vector(), cfg=cfg, presentation=pres)
    assert dict(cert.upper_candidates)["block-domination"] >= cert.upper


def test_tsirelson_analysis_reassembles_the_functional():
    rng = random.Random(5)
    seen = 0
    for _ in range(300):
        t = random_term(rng, 1, 30, 4, cfg)
        tree = tree_analysis(t)
        assert tree.depth >= 1 and tree.size >= 1
        if not isinstance(t, TypeIAlpha):
            with pytest.raises(TypeError):
                tsirelson_analysis(t)
            continue
        seen += 1
        pieces = tsirelson_analysis(t)
        total = RationalVector()
        for g in pieces:
            total = total + g.vector
        if t.weight == 1:
            assert total == t.vector.scale(2)
        else:
            assert total.scale(Fraction(1, 2)) == t.vector
            assert len(pieces) <= t.items[0].min_support
    assert seen > 10


def test_basic_inequality_on_random_instances():
    rng = random.Random(7)
    for _ in range(60):
        xs = random_blocks(rng, rng.randint(1, 5), start=rng.randint(1, 5))
        f = random_term(rng, 1, xs.blocks[-1].max_support + 2, 4, cfg)
        g = basic_inequality_witness(f, xs, cfg)
        assert not validate(g, cfg, grammar="W_|||")
        for x in xs:
            assert 2 * g.vector[x.max_support] >= evaluate(f, x)


class _Record:
    def __init__(self):
        self.blocks = [RationalVector({k: 1}) for k in range(10, 20)]
        self.coeffs = [Fraction(1, 10)] * 10
        self.x = RationalVector({k: Fraction(1, 10) for k in range(10, 20)})
        self.n, self.C, self.hypotheses_faithful = 1, 1, False


def test_harness_rejects_malformed_families():
    rec = _Record()
    with pytest.raises(MalformedInstance):
        inequality_harness("average-on-vector", rec, Unit(3), cfg)
    with pytest.raises(MalformedInstance):
        inequality_harness("vfg-family-on-vector", rec, [], cfg)
    with pytest.raises(MalformedInstance):
        inequality_harness("beta-family-on-exact-vector", rec, [Unit(3)], cfg)
    with pytest.raises(MalformedInstance):
        inequality_harness("no-such-case", rec, [Unit(3)], cfg)


def test_harness_average_case_reports_exact_sides():
    rec = _Record()
    a = AlphaAverage(10, tuple(Unit(k) for k in range(10, 20)))
    r = inequality_harness("average-on-vector", rec, a, cfg)
    assert r.lhs == Fraction(1, 10)
    assert r.holds
    assert r.to_json()["hypotheses_faithful"] is False
