from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xisp.vectors import (
    BlockSequence, BlockSequenceError, IndexInterval, RationalVector, linear_combination,
    validate_block_sequence,
)

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
vectors = st.dictionaries(st.integers(1, 40), coeffs, max_size=10).map(RationalVector)


def test_zero_entries_are_dropped():
    v = RationalVector({3: 0, 5: Fraction(1, 2)})
    assert v.support() == [5]
    assert len(v) == 1


@given(vectors, vectors)
def test_addition_is_pointwise(u, v):
    w = u + v
    for k in set(u.support()) | set(v.support()):
        assert w[k] == u[k] + v[k]


@given(vectors)
def test_json_round_trip(v):
    assert RationalVector.from_json(v.to_json()) == v


def test_json_rejects_floats_and_garbage():
    with pytest.raises(ValueError):
        RationalVector.from_json({"entries": [["1", "a/b"]]})
    with pytest.raises(ValueError):
        RationalVector.from_json([1, 2])


def test_restriction_to_interval():
    v = RationalVector({k: k for k in range(1, 10)})
    assert v.restrict(IndexInterval(3, 5)).support() == [3, 4, 5]
    assert not v.restrict(IndexInterval.empty())


def test_interval_intersection():
    a, b = IndexInterval(2, 8), IndexInterval(5, None)
    assert a.intersect(b) == IndexInterval(5, 8)
    assert a.intersect(IndexInterval(9, 12)).is_empty


def test_block_sequence_endpoints_and_combination():
    xs = BlockSequence((RationalVector({1: 1, 2: 1}), RationalVector({4: 2})))
    assert xs.psi == [1, 4]
    assert xs.phi == [2, 4]
    assert xs.combine([Fraction(1, 2), 1]) == RationalVector({1: Fraction(1, 2), 2: Fraction(1, 2), 4: 2})


def test_overlapping_blocks_are_rejected():
    bad = (RationalVector({1: 1, 3: 1}), RationalVector({2: 1}))
    assert validate_block_sequence(bad) is not None
    with pytest.raises(BlockSequenceError):
        BlockSequence(bad)


def test_linear_combination_matches_manual_sum():
    u, v = RationalVector({1: 1}), RationalVector({2: 3})
    assert linear_combination([2, -1], [u, v]) == RationalVector({1: 2, 2: -3})
