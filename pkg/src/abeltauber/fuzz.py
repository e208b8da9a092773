"""Random instance generators for the soundness fuzz suites.

Instances use the points ``v_m``, finitely supported or geometric sequences
(so ``F`` is known exactly) and gaps from the expression family. Instances
whose windows would exceed ``max_l`` are skipped to bound runtime.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ceil_q
from .gaps import Compose, Constant, GapFunction, Linear, PointwiseMax, Polynomial
from .series import V_POINTS, CoefficientSequence, finite, geometric
from .theorems import AbelInstance, TauberInstance, check_abel, check_tauber

EPS_CHOICES = (Fraction(1, 4), Fraction(1, 10), Fraction(1))


def random_rational(rng: random.Random, lo=-1, hi=1, max_den: int = 4) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_gap(rng: random.Random, depth: int = 0) -> GapFunction:
    roll = rng.randrange(6 if depth == 0 else 3)
    if roll == 0:
        return Constant(rng.randint(0, 4))
    if roll == 1:
        return Linear(rng.randint(0, 2), rng.randint(0, 3))
    if roll == 2:
        return Polynomial((rng.randint(0, 2), rng.randint(0, 1), rng.randint(0, 1)))
    if roll == 3:
        return PointwiseMax((random_gap(rng, 1), random_gap(rng, 1)))
    if roll == 4:
        return Compose(Linear(1, rng.randint(0, 2)), random_gap(rng, 1))
    return Linear(1, 0)


def random_finite(rng: random.Random, max_len: int = 6, positive: bool = False) -> CoefficientSequence:
    n = rng.randint(1, max_len)
    lo = 0 if positive else -1
    return finite([random_rational(rng, lo, 1) for _ in range(n)])


def random_geometric(rng: random.Random, positive: bool = False) -> CoefficientSequence:
    ratios = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(2, 3))
    if not positive:
        ratios += (Fraction(-1, 2), Fraction(-1, 3))
    scales = (Fraction(1), Fraction(1, 2)) + (() if positive else (Fraction(-1),))
    return geometric(rng.choice(ratios), rng.choice(scales))


def random_sequence(rng: random.Random) -> CoefficientSequence:
    return random_finite(rng) if rng.random() < 0.6 else random_geometric(rng)


def random_abel_instance(rng: random.Random, max_l: int = 6000) -> AbelInstance | None:
    seq = random_sequence(rng)
    eps = rng.choice(EPS_CHOICES)
    g = random_gap(rng)
    L = max(seq.partial_sum_bound, Fraction(1, 8)) * rng.choice((1, 1, 2))
    top = (seq.support if seq.support is not None else 10) + 3
    N1 = rng.randint(1, top)
    base = ceil_q(8 * L * N1 / eps)
    N2 = max(0, base + rng.choice((-1, 0, 0, 0, 1, 4)))
    N = max(N1, N2)
    p = N + g(N) + rng.choice((0, 0, 1, 7))
    if p < 1 or N + g(N) > 4000:
        return None
    inst = AbelInstance(seq, V_POINTS, L, eps, g, N1, N2, p)
    limit = max_l if seq.support is None else 40 * max_l
    if inst.cauchy_window.hi > limit:
        return None
    return inst


def random_tauber_instance(rng: random.Random, max_l: int = 20000) -> TauberInstance | None:
    seq = random_sequence(rng)
    eps = rng.choice(EPS_CHOICES)
    g = random_gap(rng)
    L = max(seq.coeff_bound, Fraction(1, 8)) * rng.choice((1, 1, 2))
    top = (seq.support if seq.support is not None else 12) + 2
    N1 = rng.randint(0, top)
    N2 = rng.randint(1, 120)
    inst = TauberInstance(seq, L, eps, g, N1, N2)
    if inst.p > 5000:
        return None
    limit = max_l if seq.support is None else 10 * max_l
    if inst.l > limit:
        return None
    return inst


@dataclass
class FuzzStats:
    generated: int = 0
    premise_passed: int = 0
    conclusion_passed: int = 0
    skipped: int = 0
    passing_kinds: dict = field(default_factory=dict)


def soundness_fuzz(theorem: str, seed: int, passing: int = 200, max_attempts: int = 20000) -> FuzzStats:
    """Generate instances until ``passing`` of them satisfy their premise.

    Every premise-passing instance must satisfy its conclusion; otherwise the
    checker raises :class:`~abeltauber.errors.SoundnessError`.
    """
    rng = random.Random(seed)
    make = random_abel_instance if theorem == "abel" else random_tauber_instance
    check = check_abel if theorem == "abel" else check_tauber
    stats = FuzzStats()
    for _ in range(max_attempts):
        if stats.premise_passed >= passing:
            break
        inst = make(rng)
        if inst is None:
            stats.skipped += 1
            continue
        stats.generated += 1
        premise, conclusion = check(inst)
        if premise:
            stats.premise_passed += 1
            kind = inst.seq.descriptor["kind"]
            stats.passing_kinds[kind] = stats.passing_kinds.get(kind, 0) + 1
            if conclusion:
                stats.conclusion_passed += 1
    return stats
