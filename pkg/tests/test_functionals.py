import json
import random
from fractions import Fraction

import pytest

from xisp.config import SpaceConfig
from xisp.corpus import random_term
from xisp.functionals import (
    ZERO, AlphaAverage, CodingRegistry, Convex, Restricted, TypeIAlpha, TypeII, Unit, evaluate,
    term_from_json, term_height, term_to_json, validate, weight,
)
from xisp.vectors import IndexInterval, RationalVector

cfg = SpaceConfig()


def test_unit_and_average_values():
    v = RationalVector({2: 3, 3: -1})
    assert evaluate(Unit(2), v) == 3
    assert evaluate(Unit(3, -1), v) == 1
    assert evaluate(AlphaAverage(4, (Unit(2), Unit(3))), v) == Fraction(1, 2)


def test_type_one_halves_per_weight_unit():
    t = TypeIAlpha(2, (AlphaAverage(1, (Unit(3),)),))
    assert weight(t) == 2
    assert evaluate(t, RationalVector({3: 1})) == Fraction(1, 4)


def test_restriction_and_zero():
    t = Restricted(AlphaAverage(2, (Unit(2), Unit(5))), IndexInterval(4, 9))
    assert evaluate(t, RationalVector({2: 1, 5: 1})) == Fraction(1, 2)
    assert ZERO.is_zero


def test_average_with_too_many_children_is_invalid():
    bad = AlphaAverage(1, (Unit(2), Unit(3)))
    assert validate(bad, cfg)


def test_type_one_needs_successive_admissible_children():
    a, b = AlphaAverage(1, (Unit(3),)), AlphaAverage(1, (Unit(2),))
    problems = validate(TypeIAlpha(1, (a, b)), cfg)
    assert any("successive" in p.clause for p in problems)


def test_grammar_restricts_node_kinds():
    avg = AlphaAverage(2, (Unit(2), Unit(3)))
    assert not validate(avg, cfg)
    assert validate(avg, cfg, grammar="W_T")


def test_unknown_grammar():
    with pytest.raises(ValueError):
        validate(Unit(1), cfg, grammar="nope")


def test_convex_weights_must_sum_to_one():
    assert validate(Convex((Fraction(1, 3), Fraction(1, 3)), (Unit(1), Unit(2))), cfg)
    assert not validate(Convex((Fraction(1, 3), Fraction(2, 3)), (Unit(1), Unit(2))), cfg)


def test_type_two_needs_registry_for_longer_sequences():
    reg = CodingRegistry(cfg)
    m1 = next(k for k in range(2, 10**6) if cfg.in_L1(k))
    f1 = TypeIAlpha(m1, (AlphaAverage(1, (Unit(3),)),))
    assert not validate(TypeII((f1,)), cfg, registry=reg)
    m2 = reg.assign([(f1, m1)])
    f2 = TypeIAlpha(m2, (AlphaAverage(1, (Unit(4),)),))
    assert not validate(TypeII((f1, f2)), cfg, registry=reg)
    assert validate(TypeII((f1, f2)), cfg)
    f2_bad = TypeIAlpha(m2 + 1, (AlphaAverage(1, (Unit(4),)),))
    assert validate(TypeII((f1, f2_bad)), cfg, registry=reg)


def test_registry_is_injective_and_increasing():
    reg = CodingRegistry(cfg)
    hs = [[(RationalVector({k: 1}), 2)] for k in range(1, 6)]
    ws = [reg.assign(h) for h in hs]
    assert ws == sorted(set(ws))
    assert reg.assign(hs[2]) == ws[2]
    assert all(cfg.in_L2(w) for w in ws)


def test_registry_json_round_trip_is_byte_identical(tmp_path):
    reg = CodingRegistry(cfg)
    for k in range(1, 4):
        reg.assign([(RationalVector({k: 1, k + 1: Fraction(1, 2)}), 3)])
    path = tmp_path / "reg.json"
    reg.save(path)
    again = CodingRegistry.load(path)
    assert again.dumps() == reg.dumps() == path.read_text()


def test_tampered_registry_is_rejected():
    reg = CodingRegistry(cfg)
    reg.assign([(RationalVector({2: 1}), 2)])
    data = json.loads(reg.dumps())
    data["entries"][0]["weight"] = "3"
    with pytest.raises(ValueError):
        CodingRegistry.from_json(data)


def test_random_terms_are_valid_and_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        t = random_term(rng, 1, 25, 4, cfg)
        assert not validate(t, cfg), validate(t, cfg)
        again = term_from_json(json.loads(json.dumps(term_to_json(t))))
        assert term_to_json(again) == term_to_json(t)
        assert term_height(again) == term_height(t)
        v = RationalVector({k: Fraction(k % 5 - 2, 3) for k in range(1, 26)})
        assert evaluate(again, v) == evaluate(t, v)


def test_norming_functionals_have_sup_norm_at_most_one():
    rng = random.Random(4)
    for _ in range(200):
        t = random_term(rng, 1, 30, 4, cfg)
        assert t.vector.sup_norm() <= 1
