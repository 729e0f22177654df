from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmpchain import combinat


def test_binom_conventions():
    assert combinat.binom(5, 2) == 10
    assert combinat.binom(3, 5) == 0
    assert combinat.binom(-1, 0) == 0
    assert combinat.binom(5, -1) == 0
    assert combinat.binom(0, 0) == 1


def test_vandermonde_shift_spot_values():
    # sum_p C(p,1) C(5-p,2) = 6 + 6 + 3 = 15 = C(6,4)
    assert combinat.vandermonde_shift(5, 3, 1) == (15, 15)
    assert combinat.vandermonde_shift(0, 0, 0) == (1, 1)
    assert combinat.vandermonde_shift(7, 7, 7) == (1, 1)


def test_vandermonde_shift_exact_grid():
    for n in range(25):
        for m in range(n + 1):
            for q in range(m + 1):
                lhs, rhs = combinat.vandermonde_shift(n, m, q)
                assert lhs == rhs


def test_vandermonde_shift_rejects_bad_ranges():
    with pytest.raises(ValueError):
        combinat.vandermonde_shift(3, 4, 0)
    with pytest.raises(ValueError):
        combinat.vandermonde_shift(3, 2, 3)
    with pytest.raises(ValueError):
        combinat.vandermonde_shift(3, 2, -1)


def test_marginal_distribution_is_uniform():
    law = combinat.marginal_distribution(4, 2)
    assert law == [Fraction(1, 3)] * 3
    law = combinat.marginal_distribution(9, 5)
    assert law == [Fraction(1, 6)] * 6
    assert sum(law) == 1


def test_marginal_matches_enumeration_small():
    for n_pair in range(7):
        for m in range(n_pair + 1):
            exact = combinat.marginal_distribution(n_pair, m)
            enum = combinat.enumerate_marginal(n_pair, m)
            assert exact == enum


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=12), st.data())
def test_marginal_uniform_property(n_pair, data):
    m = data.draw(st.integers(min_value=0, max_value=n_pair))
    law = combinat.marginal_distribution(n_pair, m)
    assert law == [Fraction(1, m + 1)] * (m + 1)
    assert law == combinat.enumerate_marginal(n_pair, m)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        combinat.enumerate_marginal(combinat.ENUMERATION_LIMIT + 1, 2)
    with pytest.raises(ValueError):
        combinat.marginal_distribution(4, 5)
