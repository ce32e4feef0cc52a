from fractions import Fraction

import pytest

from xisp.config import InfeasibleAtBudget
from xisp.scc import (
    SccDescriptor, generate_basic_scc, lift_scc, phi_shift, restriction_bound_check, validate_basic_scc,
)
from xisp.vectors import BlockSequence, RationalVector


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("eps", [Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
def test_generated_descriptors_validate(n, eps):
    d = generate_basic_scc(n, eps)
    assert validate_basic_scc(d) is None
    assert sum(c for _, c in d.coeffs.items()) == 1


def test_level_three_is_generated_when_small():
    d = generate_basic_scc(3, 1)
    assert validate_basic_scc(d) is None


def test_level_three_at_small_tolerance_is_infeasible():
    with pytest.raises(InfeasibleAtBudget) as info:
        generate_basic_scc(3, Fraction(1, 4))
    assert "2^" in info.value.estimate


def test_validator_rejects_non_convex():
    d = SccDescriptor(1, Fraction(1, 2), RationalVector({3: Fraction(1, 2), 4: Fraction(1, 4)}))
    assert validate_basic_scc(d) is not None


def test_identity_lift():
    d = generate_basic_scc(1, Fraction(1, 4))
    units = BlockSequence(tuple(RationalVector({k: 1}) for k in d.support))
    assert lift_scc(units, d) == d.coeffs


def test_phi_shift_doubles_tolerance_and_stays_valid():
    d = generate_basic_scc(1, Fraction(1, 4), 2)
    blocks = BlockSequence(tuple(RationalVector({k: 1}) for k in d.support))
    shifted = phi_shift(blocks, d)
    assert shifted.eps == 2 * d.eps
    assert validate_basic_scc(shifted) is None


def test_restriction_bound_on_subsets():
    d = generate_basic_scc(2, Fraction(1, 4))
    F = d.support
    for G in (F, F[::2], F[5:40], F[-3:]):
        assert restriction_bound_check(d, G).holds


def test_descriptor_json_round_trip():
    d = generate_basic_scc(2, Fraction(1, 2))
    assert SccDescriptor.from_json(d.to_json()) == d
