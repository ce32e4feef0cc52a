from fractions import Fraction

import pytest

from xisp.config import FAITHFUL, InfeasibleAtBudget, SpaceConfig
from xisp.constructions import (
    FAILS, HOLDS, UNCERTIFIED, alpha_index_witness, beta_index_witness, build_c0_blocks,
    build_c_theta_vector, build_dependent_sequence, build_exact_pair, build_exact_vector,
    vector_tolerance,
)
from xisp.functionals import CodingRegistry, evaluate, validate
from xisp.normsearch import Budget

cfg = SpaceConfig()


def test_c0_blocks_are_normed_by_their_averages():
    c0 = build_c0_blocks(4, cfg, start=2)
    for y, a in zip(c0.blocks, c0.witnesses):
        assert evaluate(a, y) == 1
        assert not validate(a, cfg)
        assert len(y) <= y.min_support


def test_faithful_c0_block_sizes():
    c0 = build_c0_blocks(3, SpaceConfig(FAITHFUL))
    assert [len(y) for y in c0.blocks] == [1, 3, 33]


def test_tolerance_meets_the_required_bound():
    for n, C in ((1, 1), (1, 2), (2, 1)):
        assert vector_tolerance(n, C) < Fraction(1, 36 * C * 8 ** n)


def test_c_theta_vector_at_level_one_has_every_clause():
    rec = build_c_theta_vector(1, 1, cfg)
    assert rec.hypotheses_faithful
    assert {s for _, s in rec.clauses} == {HOLDS}
    assert rec.certificate.lower >= rec.theta


def test_c_theta_vector_at_level_two_is_infeasible():
    with pytest.raises(InfeasibleAtBudget):
        build_c_theta_vector(2, 1, cfg)


def test_scaled_exact_vector_reports_relaxed_clauses():
    rec = build_exact_vector(1, cfg)
    statuses = dict(rec.clauses)
    assert FAILS in statuses.values()
    assert UNCERTIFIED in statuses.values() or FAILS in statuses.values()
    assert not rec.hypotheses_faithful
    assert "clauses" in rec.to_json()


def test_exact_pair_kind_one_normalises_the_action():
    reg = CodingRegistry(cfg)
    pair = build_exact_pair(4, 1, cfg, reg)
    assert evaluate(pair.f, pair.x) == 1
    assert not validate(pair.f, cfg, registry=reg)


def test_exact_pair_kind_zero_acts_trivially():
    pair = build_exact_pair(3, 0, cfg, CodingRegistry(cfg))
    assert evaluate(pair.f, pair.x) == 0


def test_dependent_sequence_is_coded():
    reg = CodingRegistry(cfg)
    seq = build_dependent_sequence(2, 1, cfg, reg)
    assert list(seq.weights) == sorted(seq.weights)
    assert not validate(seq.functional, cfg, registry=reg)
    assert evaluate(seq.functional, seq.xs[0] + seq.xs[1]) == 1
    assert set(dict(seq.clauses).values()) == {HOLDS}


def test_dependent_sequence_is_reproducible():
    a = build_dependent_sequence(3, 1, cfg, CodingRegistry(cfg))
    reg = CodingRegistry(cfg)
    b = build_dependent_sequence(3, 1, cfg, reg)
    assert a.weights == b.weights
    assert a.to_json() == b.to_json()


def test_index_witnesses_are_attained():
    reg = CodingRegistry(cfg)
    seq = build_dependent_sequence(2, 1, cfg, reg)
    score, fam = alpha_index_witness(seq.xs, 1, Budget(2, 2, 4), cfg)
    assert score >= 0
    bscore, bfam = beta_index_witness(seq.xs, 1, Budget(2, 2, 4), reg, cfg)
    assert bscore >= 0
    assert beta_index_witness(seq.xs, 1) == (0, [])
