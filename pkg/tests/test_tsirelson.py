from fractions import Fraction

from hypothesis import given, settings, strategies as st

from xisp.functionals import evaluate
from xisp.tsirelson import (
    brute_force_tsirelson, modified_norm, modified_norm_with_witness, schreier_layer_bounds,
    tsirelson_bounds, tsirelson_norm, tsirelson_value,
)
from xisp.vectors import RationalVector

small = st.dictionaries(st.integers(1, 16), st.fractions(-3, 3, max_denominator=4).filter(bool),
                        min_size=1, max_size=7).map(RationalVector)


def test_unit_vector_has_norm_one():
    assert tsirelson_value(RationalVector({5: 1})) == 1


def test_flat_vector_uses_halving():
    # e_2 + e_3: one S_1 set of two points gives 1/2 * 2 = 1; max coordinate 1
    assert tsirelson_value(RationalVector({2: 1, 3: 1})) == 1
    v = RationalVector({k: 1 for k in range(3, 9)})
    assert tsirelson_value(v) == brute_force_tsirelson(v) == 2


@settings(max_examples=80)
@given(small)
def test_dynamic_programme_matches_enumeration(v):
    assert tsirelson_value(v) == brute_force_tsirelson(v)


@given(small)
def test_witness_attains_the_value(v):
    value, w = tsirelson_norm(v)
    assert evaluate(w.term, v) == value


@given(small)
def test_sandwich(v):
    t = tsirelson_value(v)
    assert t <= modified_norm(v) <= 3 * t


@given(small)
def test_modified_witness_attains_the_value(v):
    value, w = modified_norm_with_witness(v)
    assert evaluate(w, v) == value


@given(small)
def test_unconditional(v):
    flipped = RationalVector({k: -c for k, c in v.items()})
    assert tsirelson_value(flipped) == tsirelson_value(v)


@given(small)
def test_layer_bounds_bracket_the_exact_value(v):
    b = schreier_layer_bounds(v)
    t = tsirelson_value(v)
    assert b.lower <= t <= b.upper
    assert evaluate(b.witness, v) == b.lower


def test_bounds_on_long_support_are_certified():
    v = RationalVector({k: Fraction(1, k) for k in range(2, 200)})
    b = tsirelson_bounds(v)
    assert not b.exact
    assert evaluate(b.witness, v) == b.lower <= b.upper
