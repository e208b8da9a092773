from fractions import Fraction as Q

import pytest

from abeltauber.errors import ConfigurationError, ResourceLimitError
from abeltauber.exact import ceil_q, omega
from abeltauber.fuzz import random_abel_instance, random_tauber_instance
from abeltauber.gaps import Constant, Linear
from abeltauber.limits import Limits
from abeltauber.series import V_POINTS, from_callable, geometric, power, zero
from abeltauber.theorems import (
    AbelInstance,
    TauberInstance,
    abel_conclusion_holds,
    abel_premise_holds,
    check_abel,
    check_tauber,
    tauber_conclusion_holds,
    tauber_premise_holds,
)
from oracles import least_joint_naive, v_point

ALT = from_callable(lambda i: Q((-1) ** i), coeff_bound=1, partial_sum_bound=1)


def test_abel_derived_quantities():
    inst = AbelInstance(zero(), V_POINTS, 1, 1, Constant(2), 3, 5, 7)
    assert inst.N == 5
    assert inst.l == omega(Q(1, 56), 7)
    assert inst.window.lo == 5 and inst.window.hi == 7


def test_abel_premise_trivial_for_zero_sequence():
    # points clause: 1/p <= 1/m <= eps/(8 L N1) on [N2; N+g(N)]
    inst = AbelInstance(zero(), V_POINTS, 1, 1, Constant(2), 1, 8, 10)
    assert abel_premise_holds(inst)
    assert abel_conclusion_holds(inst)


def test_abel_premise_fails_on_oscillation():
    inst = AbelInstance(ALT, V_POINTS, 1, Q(1, 2), Constant(1), 3, 48, 50)
    rep = abel_premise_holds(inst)
    assert not rep
    assert rep.violation.clause == "cauchy"
    i, n = rep.violation.indices
    assert abs(ALT.partial_sum(i) - ALT.partial_sum(n)) > Q(1, 8)


def test_abel_points_clause_bounds():
    seq = zero()
    # p too small for x_{N+g(N)}
    assert abel_premise_holds(AbelInstance(seq, V_POINTS, 1, 1, Constant(2), 1, 8, 9)).violation.clause == "points_lower"
    # N2 too small for eps/(8 L N1)
    assert abel_premise_holds(AbelInstance(seq, V_POINTS, 1, 1, Constant(2), 1, 7, 10)).violation.clause == "points_upper"


def test_abel_geometric_end_to_end():
    seq = geometric(Q(1, 2))
    eps, L, g = Q(1, 2), Q(2), Linear(1, 0)
    N1 = 4
    N2 = ceil_q(8 * L * N1 / eps)
    N = max(N1, N2)
    inst = AbelInstance(seq, V_POINTS, L, eps, g, N1, N2, N + g(N))
    premise, conclusion = check_abel(inst)
    assert premise and conclusion
    # independent check of the conclusion with closed forms
    F = lambda m: 2 / (2 - v_point(m))  # noqa: E731
    s = lambda n: 2 - Q(1, 2**n)  # noqa: E731
    w = inst.window
    assert all(abs(F(m) - s(n)) <= eps for m in w for n in w)


def test_abel_instance_validation():
    for args in ((0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)):
        L, eps, N1, p = args
        with pytest.raises(ConfigurationError):
            AbelInstance(zero(), V_POINTS, L, eps, Constant(0), N1, 1, p)


def test_tauber_derived_quantities():
    inst = TauberInstance(zero(), 1, 1, Constant(3), 2, 5)
    assert inst.N == max(ceil_q(Q(2 * 1 * 4, 1)), 5) == 8
    assert inst.p == 11
    assert inst.l == omega(Q(1, 44), 11)


def test_tauber_zero_sequence():
    for N1 in (0, 1, 5):
        for N2 in (1, 3):
            inst = TauberInstance(zero(), 1, 1, Linear(1, 1), N1, N2)
            assert tauber_premise_holds(inst) and tauber_conclusion_holds(inst)


def test_tauber_condition_negative():
    # i |a_i| = i/(i+1) >= 1/2 > eps/8 for eps < 4, any i >= 1
    inst = TauberInstance(power(1), 1, Q(1, 2), Constant(0), 3, 1)
    rep = tauber_premise_holds(inst)
    assert not rep and rep.violation.clause == "tail"


def test_tauber_geometric():
    seq = geometric(Q(1, 2))
    inst = TauberInstance(seq, 1, 1, Constant(2), 6, 7)
    premise, conclusion = check_tauber(inst)
    assert premise and conclusion
    F = lambda m: Q(2 * m, m + 1) if m else Q(1)  # noqa: E731
    assert all(F(m) == 2 / (2 - v_point(m)) for m in range(50))


def test_window_guard():
    inst = TauberInstance(zero(), 1, Q(1, 1000), Constant(0), 0, 1)
    with pytest.raises(ResourceLimitError):
        tauber_premise_holds(inst, Limits(max_window=10))


def test_abel_conclusion_matches_brute_force_on_random_instances():
    import random

    rng = random.Random(11)
    seen = 0
    while seen < 15:
        inst = random_abel_instance(rng)
        if inst is None or len(inst.window) > 40:
            continue
        seen += 1
        seq = inst.seq
        got = bool(abel_conclusion_holds(inst))
        F = lambda m: seq.abel_value(v_point(m))  # noqa: E731
        w = inst.window
        brute = all(abs(F(m) - seq.partial_sum(n)) <= inst.eps for m in w for n in w)
        # the checker may only be more conservative than the truth
        assert brute or not got


def test_random_tauber_instances_are_sound():
    import random

    rng = random.Random(5)
    done = 0
    while done < 20:
        inst = random_tauber_instance(rng)
        if inst is None:
            continue
        done += 1
        premise, conclusion = check_tauber(inst)
        assert conclusion or not premise


def test_brute_force_oracle_helper():
    assert least_joint_naive(lambda m: Q(0), lambda n: Q(0), Q(1), lambda n: n, 3) == 0
