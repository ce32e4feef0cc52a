from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from xisp import schreier
from xisp.oracles import in_schreier_by_definition, max_sum_by_enumeration

sets = st.lists(st.integers(1, 30), max_size=12, unique=True).map(sorted)


def test_small_cases():
    assert schreier.member([], 0)
    assert schreier.member([7], 0)
    assert not schreier.member([2, 3], 0)
    assert schreier.member([2, 3], 1)
    assert not schreier.member([2, 3, 4], 1)
    assert schreier.member([2, 3, 4], 2)


@given(sets, st.integers(0, 3))
def test_member_matches_definition(F, n):
    assert schreier.member(F, n) == in_schreier_by_definition(tuple(F), n)


@given(sets, st.integers(0, 3))
def test_witnesses_are_structurally_valid(F, n):
    w = schreier.is_member(F, n)
    if w is not None:
        assert schreier.check_witness(w)
        assert w.level == n
        assert schreier.SchreierWitness.from_json(w.to_json()) == w


@given(sets, st.integers(0, 3))
def test_hereditary(F, n):
    if schreier.member(F, n):
        for r in range(len(F)):
            for G in combinations(F, r):
                assert schreier.member(G, n)


@given(sets, st.integers(0, 2))
def test_greedy_pieces_lie_in_the_family(F, n):
    pieces = schreier.greedy_pieces(F, n)
    assert [e for p in pieces for e in p] == F
    assert all(schreier.member(p, n) for p in pieces)


@settings(max_examples=60)
@given(st.dictionaries(st.integers(1, 20), st.fractions(0, 6, max_denominator=4), max_size=9),
       st.integers(0, 3))
def test_max_sum_matches_enumeration(weights, n):
    val, G = schreier.max_schreier_sum(weights, n)
    assert val == max_sum_by_enumeration(weights, n)
    assert schreier.member(G, n)
    assert sum((Fraction(weights[k]) for k in G), Fraction(0)) == val


def test_negative_weights_rejected():
    with pytest.raises(ValueError):
        schreier.max_schreier_sum({1: -1}, 1)


def test_automaton_agrees_with_membership():
    for r in range(0, 8):
        for F in combinations(range(1, 9), r):
            for n in range(4):
                caps = None
                alive = True
                for e in F:
                    caps = schreier.automaton_step(caps, e, n)
                    if caps is False:
                        alive = False
                        break
                assert alive == schreier.member(F, n)


def test_admissibility_uses_minimal_supports():
    from xisp.vectors import RationalVector
    blocks = [RationalVector({2: 1, 3: 1}), RationalVector({5: 1})]
    assert schreier.is_admissible(blocks, 1)
    assert not schreier.is_admissible(blocks, 0)
