import random
from fractions import Fraction as Q

import pytest

from abeltauber.gaps import Linear
from abeltauber.metastability import CauchyOf, CauchyOfPartialSums, least_metastable_N
from abeltauber.specker import (
    MonotonicityError,
    BaseSequence,
    check_tauber_condition_32,
    dyadic_approach,
    rational_approach,
    table,
    transform_31,
    transform_32,
)
from oracles import partial_sums_naive


def random_base(rng: random.Random, length: int = 14) -> BaseSequence:
    q = Q(rng.randint(-4, 4), rng.randint(1, 4))
    vals = [q]
    for _ in range(length - 1):
        q += Q(rng.randint(0, 3), rng.randint(1, 9))
        vals.append(q)
    return table(vals)


def test_transform_31_dyadic():
    base = dyadic_approach()
    seq = transform_31(base)
    assert seq.coeff(0) == 0
    assert [seq.coeff(n + 1) for n in range(5)] == [Q(1, 2 ** (n + 1)) for n in range(5)]
    assert partial_sums_naive(seq.coeff, 64) == [base(n) for n in range(65)]


def test_transform_31_examples():
    assert transform_31(rational_approach()).partial_sum(5) == Q(5, 6)
    seq = transform_31(table(["3/2"]))
    assert seq.coeff(0) == Q(3, 2) and all(seq.coeff(n) == 0 for n in range(1, 20))


def test_transform_32_hand_values():
    seq = transform_32(dyadic_approach())
    assert [seq.coeff(n) for n in range(5)] == [0, Q(1, 2), Q(1, 4), Q(1, 16), Q(1, 16)]
    assert seq.partial_sum(2) == Q(3, 4) and seq.partial_sum(4) == Q(7, 8)


def test_transform_32_seed_overlap_at_two():
    # n = 2 gives m = 1 and divisor 2^0 = 1, so a_2 = q_2 - q_1 right after the seed a_1 = q_1 - q_0
    base = random_base(random.Random(1))
    seq = transform_32(base)
    assert seq.coeff(1) == base(1) - base(0)
    assert seq.coeff(2) == base(2) - base(1)
    assert seq.partial_sum(2) == base(2)


def test_transform_32_closed_form_partial_sums():
    rng = random.Random(2)
    for _ in range(5):
        seq = transform_32(random_base(rng))
        assert [seq.partial_sum(n) for n in range(300)] == partial_sums_naive(seq.coeff, 299)


def test_transform_32_constant_base():
    seq = transform_32(table(["1/3"]))
    assert seq.coeff(0) == Q(1, 3) and all(seq.coeff(n) == 0 for n in range(1, 100))
    rep = check_tauber_condition_32(table(["1/3"]), 50)
    assert rep.passed and rep.worst_ratio is None


def test_tauber_condition_examples():
    assert check_tauber_condition_32(dyadic_approach(), 100).passed
    rep = check_tauber_condition_32(rational_approach(), 200)
    assert rep.passed and rep.checked == 199
    seq = transform_32(rational_approach())
    for n in range(2, 201):
        m = (n - 1).bit_length()
        assert n * abs(seq.coeff(n)) <= Q(2, (m + 1) * (m + 2))


def test_monotonicity_is_enforced():
    bad = BaseSequence(lambda n: Q((-1) ** n), 1)
    with pytest.raises(MonotonicityError):
        transform_31(bad).partial_sum(3)
    over = BaseSequence(lambda n: Q(n), 3)
    with pytest.raises(MonotonicityError):
        over(4)


def test_declared_bounds_hold():
    rng = random.Random(4)
    for _ in range(5):
        base = random_base(rng)
        for seq in (transform_31(base), transform_32(base)):
            seq.verify_bounds(400)


def test_composition_with_metastability_oracle():
    base = rational_approach()
    seq = transform_31(base)
    g = Linear(3, 1)
    eps = Q(1, 20)
    assert least_metastable_N(CauchyOfPartialSums(seq, eps), g, 500) == least_metastable_N(CauchyOf(base, eps), g, 500)
