"""Composed rates of metastability for the Abel and Tauber conclusions.

The window-search functionals are realized by bounded exhaustive search
(plus the closed form ``ceil(1/delta)`` for the points ``v_m``), and every
returned index is re-verified before it is handed out. The composed
pipelines post-verify their final ``N`` against the finite theorems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConfigurationError, ResourceLimitError, SearchExhausted, SoundnessError
from .exact import as_rational, ceil_log2, ceil_q, format_rational, omega
from .gaps import GapFunction, Window
from .limits import DEFAULT_LIMITS, Limits
from .metastability import CauchyOfF, CauchyOfPartialSums, PointsNear1, SmallTailCoeff, WindowPredicate
from .series import V_POINTS, CoefficientSequence, PointFamily
from .theorems import (
    AbelInstance,
    TauberInstance,
    abel_conclusion_holds,
    abel_premise_holds,
    tauber_conclusion_holds,
    tauber_premise_holds,
)

Hook = Callable[[int], int]


def _least_window(pred: WindowPredicate, h: Hook, cap: int, stage: str, start: int, limits: Limits) -> int:
    for n in range(start, cap + 1):
        w = Window(n, h(n))
        if len(w) > limits.max_window:
            raise ResourceLimitError(f"{stage}: window [{w.lo}; {w.hi}] exceeds max_window={limits.max_window}")
        if pred.holds_on(w):
            return n
    raise SearchExhausted(stage, cap)


def phi_points(points: PointFamily, delta, h: Hook, cap: int, limits: Limits = DEFAULT_LIMITS) -> int:
    """Index ``n`` with ``1 - delta <= x_m`` for every ``m`` in ``[n; h(n)]``.

    ``delta=None`` stands for an infinite tolerance. For ``v_m`` the answer is
    ``ceil(1/delta)``; other families are scanned for the least such ``n``.
    """
    if delta is None:
        return 0
    delta = as_rational(delta)
    if delta <= 0:
        raise ConfigurationError(f"phi needs delta > 0, got {delta}")
    if delta >= 1:
        return 0
    if points.is_v:
        n = ceil_q(1 / delta)
        # v_m increases with m, so the left endpoint decides the whole window
        if h(n) >= n and points(n) < 1 - delta:
            raise SoundnessError(f"closed-form phi({delta}) = {n} fails at its own endpoint")
        return n
    return _least_window(PointsNear1(points, delta), h, cap, "phi", 0, limits)


def psi_tail(seq: CoefficientSequence, eps, h: Hook, cap: int, start: int = 0, limits: Limits = DEFAULT_LIMITS) -> int:
    """Least ``n`` with ``i |a_i| <= eps/8`` for every ``i`` in ``[n; h(n)]``."""
    eps = as_rational(eps)
    return _least_window(SmallTailCoeff(seq, eps / 8), h, cap, "psi", start, limits)


def cauchy_sums_search(
    seq: CoefficientSequence, eps, h: Hook, cap: int, start: int = 1, limits: Limits = DEFAULT_LIMITS
) -> int:
    """Least ``n >= start`` with ``|s_i - s_j| <= eps`` on ``[n; h(n)]``."""
    return _least_window(CauchyOfPartialSums(seq, eps), h, cap, "partial-sum metastability", start, limits)


def cauchy_abel_search(
    seq: CoefficientSequence,
    eps,
    h: Hook,
    cap: int,
    start: int = 1,
    coeff_bound=None,
    limits: Limits = DEFAULT_LIMITS,
    pred: CauchyOfF | None = None,
) -> int:
    """Least ``n >= start`` with ``|F(v_m) - F(v_k)| <= eps`` on ``[n; h(n)]``."""
    pred = pred or CauchyOfF(seq, eps, V_POINTS, coeff_bound=coeff_bound)
    return _least_window(pred, h, cap, "F(v) metastability", start, limits)


@dataclass
class RateBundle:
    """Every intermediate of one composed-rate run, for audit."""

    kind: str
    eps: Fraction
    L: Fraction
    gap: dict | None
    N1: int
    N2: int
    N: int
    p: int
    l: int
    M_N1: int
    f_N1: int
    h_N1_N2: int
    g_N: int
    extras: dict = field(default_factory=dict)

    def identities(self) -> dict:
        """Audit identities recomputed from the stored fields."""
        out = {"h_N1(N2) = N+g(N)": self.h_N1_N2 == self.N + self.g_N, "M_N1 = N": self.M_N1 == self.N}
        if self.kind == "abel":
            out["f(N1) = max{N+g(N), l}"] = self.f_N1 == max(self.N + self.g_N, self.l)
        else:
            out["f(N1) = omega(eps/4Lp, p)"] = self.f_N1 == omega(self.eps / (4 * self.L * self.p), self.p)
            out["p = N+g(N)"] = self.p == self.N + self.g_N
        return out

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "eps": format_rational(self.eps),
            "L": format_rational(self.L),
            "gap": self.gap,
        }
        for name in ("N1", "N2", "N", "p", "l", "M_N1", "f_N1", "h_N1_N2", "g_N"):
            d[name] = str(getattr(self, name))
        d["extras"] = self.extras
        return d


def _gap_dict(g: GapFunction):
    try:
        return g.to_dict()
    except ConfigurationError:
        return None


def abel_rate(
    eps,
    g: GapFunction,
    L,
    seq: CoefficientSequence,
    points: PointFamily = V_POINTS,
    cap: int | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[int, RateBundle]:
    """Metastability index for ``|F(x_m) - s_n|`` built from the metastability of ``s``.

    ``f(a) = max{M_a + g(M_a), omega(eps/(8 L p_a), p_a)}`` with
    ``M_a = max{a, phi(eps/(8La), h_a)}``, ``h_a(b) = max{a,b} + g(max{a,b})``
    and ``p_a = ceil(max 1/(1-x_m), m <= M_a + g(M_a))``. ``N1`` is found on
    ``[N1; f(N1)]`` (with ``N1 >= 1``), ``N2 = phi(eps/(8 L N1), h_N1)``.
    """
    eps = as_rational(eps)
    L = as_rational(L)
    if eps <= 0 or L <= 0:
        raise ConfigurationError("abel_rate needs eps > 0 and L > 0")
    cap = limits.search_cap if cap is None else cap

    def h_for(a: int) -> Hook:
        return lambda b: max(a, b) + g(max(a, b))

    def phi_at(a: int) -> int:
        delta = None if a == 0 else eps / (8 * L * a)
        try:
            return phi_points(points, delta, h_for(a), cap, limits)
        except SearchExhausted as exc:
            raise SearchExhausted(f"phi at a={a}", cap) from exc

    memo: dict[int, tuple[int, int, int]] = {}

    def f_parts(a: int) -> tuple[int, int, int]:
        if a not in memo:
            M = max(a, phi_at(a))
            top = M + g(M)
            p = points.p_upto(top)
            memo[a] = (M, p, max(top, omega(eps / (8 * L * p), p)))
        return memo[a]

    def f(a: int) -> int:
        return f_parts(a)[2]

    try:
        N1 = cauchy_sums_search(seq, eps / 4, f, cap, start=1, limits=limits)
    except SearchExhausted as exc:
        raise SearchExhausted("partial-sum metastability (N1)", cap) from exc
    N2 = phi_at(N1)
    N = max(N1, N2)
    gN = g(N)
    p = points.p_upto(N + gN)
    l = omega(eps / (8 * L * p), p)
    M_N1, _, f_N1 = f_parts(N1)
    bundle = RateBundle(
        kind="abel",
        eps=eps,
        L=L,
        gap=_gap_dict(g),
        N1=N1,
        N2=N2,
        N=N,
        p=p,
        l=l,
        M_N1=M_N1,
        f_N1=f_N1,
        h_N1_N2=h_for(N1)(N2),
        g_N=gN,
    )
    inst = AbelInstance(seq, points, L, eps, g, N1, N2, p)
    premise = abel_premise_holds(inst, limits)
    if not premise:
        raise SoundnessError(f"abel_rate produced (N1, N2, p) = ({N1}, {N2}, {p}) violating the premise: {premise.violation}")
    conclusion = abel_conclusion_holds(inst, limits)
    if not conclusion:
        raise SoundnessError(f"abel_rate: premise verified but conclusion failed: {conclusion.violation}")
    bundle.extras = {"premise": premise.to_dict(), "conclusion": conclusion.to_dict()}
    return N, bundle


def tauber_rate(
    eps,
    g: GapFunction,
    L,
    seq: CoefficientSequence,
    cap: int | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[int, RateBundle]:
    """Metastability index for ``|F(v_m) - s_n|`` from the Tauber condition and
    the metastability of ``F(v_n)``.

    The long window ``[N1; f(N1)]`` belongs to the tail condition
    ``i |a_i| <= eps/8`` and the short window ``[N2; h_N1(N2)]`` to the
    ``F(v)``-Cauchy condition, matching where the finite theorem uses them:
    ``c(a) = ceil(2 L a^2 / eps)``, ``h_a(b) = max{c(a), b} + g(max{c(a), b})``,
    ``M_a = max{c(a), Phi_F(h_a)}``, ``p_a = M_a + g(M_a)`` and
    ``f(a) = omega(eps/(4 L p_a), p_a)``.
    """
    eps = as_rational(eps)
    L = as_rational(L)
    if eps <= 0 or L <= 0:
        raise ConfigurationError("tauber_rate needs eps > 0 and L > 0")
    cap = limits.search_cap if cap is None else cap
    bound = seq.coeff_bound if seq.coeff_bound is not None else L
    f_pred = CauchyOfF(seq, eps / 4, V_POINTS, coeff_bound=bound)

    def c(a: int) -> int:
        return ceil_q(2 * L * a * a / eps)

    def h_for(a: int) -> Hook:
        ca = c(a)
        return lambda b: max(ca, b) + g(max(ca, b))

    inner_memo: dict[int, int] = {}

    def inner(a: int) -> int:
        if a not in inner_memo:
            try:
                inner_memo[a] = cauchy_abel_search(seq, eps / 4, h_for(a), cap, start=1, limits=limits, pred=f_pred)
            except SearchExhausted as exc:
                raise SearchExhausted(f"F(v) metastability at a={a}", cap) from exc
        return inner_memo[a]

    memo: dict[int, tuple[int, int, int]] = {}

    def f_parts(a: int) -> tuple[int, int, int]:
        if a not in memo:
            M = max(c(a), inner(a))
            p = M + g(M)
            memo[a] = (M, p, omega(eps / (4 * L * p), p))
        return memo[a]

    def f(a: int) -> int:
        return f_parts(a)[2]

    try:
        N1 = psi_tail(seq, eps, f, cap, limits=limits)
    except SearchExhausted as exc:
        raise SearchExhausted("tail metastability (N1)", cap) from exc
    N2 = inner(N1)
    N = max(c(N1), N2)
    gN = g(N)
    p = N + gN
    l = omega(eps / (4 * L * p), p)
    M_N1, _, f_N1 = f_parts(N1)
    bundle = RateBundle(
        kind="tauber",
        eps=eps,
        L=L,
        gap=_gap_dict(g),
        N1=N1,
        N2=N2,
        N=N,
        p=p,
        l=l,
        M_N1=M_N1,
        f_N1=f_N1,
        h_N1_N2=h_for(N1)(N2),
        g_N=gN,
    )
    inst = TauberInstance(seq, L, eps, g, N1, N2)
    premise = tauber_premise_holds(inst, limits)
    if not premise:
        raise SoundnessError(f"tauber_rate produced (N1, N2) = ({N1}, {N2}) violating the premise: {premise.violation}")
    conclusion = tauber_conclusion_holds(inst, limits)
    if not conclusion:
        raise SoundnessError(f"tauber_rate: premise verified but conclusion failed: {conclusion.violation}")
    bundle.extras = {"premise": premise.to_dict(), "conclusion": conclusion.to_dict()}
    return N, bundle


def iterate(f: Hook, k: int, x: int = 0, limits: Limits = DEFAULT_LIMITS, trace: list | None = None) -> int:
    """``f`` applied ``k`` times to ``x``, under the iteration and bit-size guards."""
    if k > limits.max_iterations:
        raise ResourceLimitError(f"{k} iterations exceed max_iterations={limits.max_iterations}")
    for step in range(k):
        x = f(x)
        if trace is not None:
            trace.append(x)
        if x.bit_length() > limits.max_bits:
            raise ResourceLimitError(
                f"iterate {step + 1} has {x.bit_length()} bits, over max_bits={limits.max_bits}",
                partial={"iterates": [str(t) for t in (trace or [])]},
            )
    return x


def monotone_metastability_bound(eps_prime, f_prime: Hook, L, limits: Limits = DEFAULT_LIMITS) -> int:
    """``f'^(ceil(L/eps'))(0)``: bounds the least ``N`` with ``|s_m - s_n| <= eps'`` on
    ``[N; f'(N)]`` for a non-decreasing ``s`` whose range has length at most ``L``."""
    eps_prime = as_rational(eps_prime)
    L = as_rational(L)
    if eps_prime <= 0 or L < 0:
        raise ConfigurationError("monotone bound needs eps' > 0 and L >= 0")
    return iterate(f_prime, ceil_q(L / eps_prime), 0, limits)


@dataclass
class GammaBundle:
    eps: Fraction
    L: Fraction
    gap: dict | None
    iterations: int
    iterates: list
    value: int

    def to_dict(self) -> dict:
        return {
            "eps": format_rational(self.eps),
            "L": format_rational(self.L),
            "gap": self.gap,
            "iterations": str(self.iterations),
            "iterates": [str(x) for x in self.iterates],
            "value": str(self.value),
        }


def gamma_terms(eps, g: GapFunction, L) -> tuple[Hook, Hook]:
    """The maps ``a -> p_a`` and ``a -> f(a)`` inside the closed-form bound."""
    eps = as_rational(eps)
    L = as_rational(L)

    def p_of(a: int) -> int:
        b = ceil_q(8 * L * a / eps)
        # p_a = 0 would put log(0) in f; enlarging p_a only enlarges the bound
        return max(1, b + g(b))

    def f(a: int) -> int:
        p = p_of(a)
        return p * max(1, ceil_log2(8 * L * p / eps))

    return p_of, f


def gamma_bundle(eps, g: GapFunction, L, limits: Limits = DEFAULT_LIMITS) -> GammaBundle:
    eps = as_rational(eps)
    L = as_rational(L)
    if eps <= 0 or L <= 0:
        raise ConfigurationError("gamma_bound needs eps > 0 and L > 0")
    _, f = gamma_terms(eps, g, L)
    k = ceil_q(4 * L / eps)
    trace: list = [0]
    top = iterate(f, k, 0, limits, trace)
    value = ceil_q(8 * L * top / eps)
    return GammaBundle(eps, L, _gap_dict(g), k, trace, value)


def gamma_bound(eps, g: GapFunction, L, limits: Limits = DEFAULT_LIMITS) -> int:
    """Closed-form bound ``ceil(8 L f^(ceil(4L/eps))(0) / eps)`` on the least ``N`` with
    ``|F(v_m) - s_n| <= eps`` on ``[N; N+g(N)]`` for positive series with ``s_n <= L``.

    The logarithm in ``f`` is taken base 2, an upper bound for the natural one.
    """
    return gamma_bundle(eps, g, L, limits).value

