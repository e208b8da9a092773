from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from abeltauber.errors import ConfigurationError
from abeltauber.exact import (
    as_natural,
    as_rational,
    ceil_log2,
    ceil_q,
    format_rational,
    omega,
    parse_rational,
)
from oracles import ceil_log2_naive, omega_naive


@pytest.mark.parametrize("q, k", [(1, 0), (10, 4), (Q(1, 3), -1), (Q(1, 2), -1), (2, 1), (Q(3, 2), 1), (1024, 10), (1025, 11)])
def test_ceil_log2_values(q, k):
    assert ceil_log2(q) == k


@pytest.mark.parametrize("bad", [0, -1, Q(-1, 2)])
def test_ceil_log2_rejects_nonpositive(bad):
    with pytest.raises(ConfigurationError):
        ceil_log2(bad)


@given(st.fractions(min_value=Q(1, 10**6), max_value=10**6))
def test_ceil_log2_matches_naive(q):
    assert ceil_log2(q) == ceil_log2_naive(q)


@pytest.mark.parametrize("eps, p, expected", [(1, 5, 5), (Q(1, 2), 2, 2), (Q(1, 10), 4, 16)])
def test_omega_examples(eps, p, expected):
    assert omega(eps, p) == expected


def test_omega_hand_check_three_quarters():
    assert Q(3, 4) ** 16 == Q(43046721, 4294967296)
    assert Q(3, 4) ** omega(Q(1, 10), 4) <= Q(1, 10)


@given(st.fractions(min_value=Q(1, 1000), max_value=4), st.integers(1, 60))
def test_omega_contract(eps, p):
    l = omega(eps, p)
    assert l == omega_naive(eps, p)
    assert l >= p
    assert (1 - Q(1, p)) ** l <= eps


def test_omega_rejects_bad_inputs():
    with pytest.raises(ConfigurationError):
        omega(0, 3)
    with pytest.raises(ConfigurationError):
        omega(Q(1, 2), 0)


@pytest.mark.parametrize("text, value", [("3/4", Q(3, 4)), ("-3/4", Q(-3, 4)), ("+7", Q(7)), ("6/8", Q(3, 4)), ("0", Q(0))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "1.5", "a/b", "", "3/-4", "1e3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_rational(text)


def test_floats_are_refused():
    with pytest.raises(ConfigurationError):
        as_rational(0.5)


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_as_natural():
    assert as_natural("12") == 12
    assert as_natural(0) == 0
    for bad in (-1, "x", 1.0, True):
        with pytest.raises(ConfigurationError):
            as_natural(bad)


@given(st.fractions(min_value=-1000, max_value=1000))
def test_ceil_q(q):
    c = ceil_q(q)
    assert c - 1 < q <= c
