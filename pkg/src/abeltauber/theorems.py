"""Executable finite Abel and Tauber theorems: premise and conclusion checkers.

All premise inequalities are exact rational comparisons. Only values of the
generated function ``F`` go through the enclosure protocol of
:mod:`abeltauber.metastability`, so a verified premise is never weaker than
the mathematical one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigurationError, ResourceLimitError, SoundnessError
from .exact import as_natural, as_rational, ceil_q, format_rational, omega
from .gaps import GapFunction, Window
from .limits import DEFAULT_LIMITS, Limits
from .metastability import CauchyOfF, JointAbel, Violation
from .series import V_POINTS, CoefficientSequence, PointFamily


@dataclass
class CheckReport:
    """Verdict of one checker plus the first violated clause, if any."""

    holds: bool
    violation: Violation | None = None
    checked: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "violation": None if self.violation is None else self.violation.to_dict(),
            "checked": {k: str(v) for k, v in self.checked.items()},
        }


def _fail(v: Violation, **checked) -> CheckReport:
    return CheckReport(False, v, checked)


def _guard(w: Window, limits: Limits, what: str) -> None:
    if len(w) > limits.max_window:
        raise ResourceLimitError(f"{what} window {w.lo}..{w.hi} exceeds max_window={limits.max_window}")


@dataclass(frozen=True)
class AbelInstance:
    """Data of the finite Abel theorem. ``N`` and ``l`` are always recomputed."""

    seq: CoefficientSequence
    points: PointFamily
    L: Fraction
    eps: Fraction
    g: GapFunction
    N1: int
    N2: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "L", as_rational(self.L))
        object.__setattr__(self, "eps", as_rational(self.eps))
        for name in ("N1", "N2", "p"):
            object.__setattr__(self, name, as_natural(getattr(self, name)))
        if self.L <= 0:
            raise ConfigurationError(f"L must be positive, got {self.L}")
        if self.eps <= 0:
            raise ConfigurationError(f"eps must be positive, got {self.eps}")
        if self.p < 1:
            raise ConfigurationError("p must be at least 1")
        if self.N1 < 1:
            raise ConfigurationError("N1 must be at least 1 (eps/(8 L N1) is undefined at N1 = 0)")

    @property
    def N(self) -> int:
        return max(self.N1, self.N2)

    @property
    def l(self) -> int:
        return omega(self.eps / (8 * self.L * self.p), self.p)

    @property
    def window(self) -> Window:
        return Window(self.N, self.N + self.g(self.N))

    @property
    def cauchy_window(self) -> Window:
        return Window(self.N1, max(self.N + self.g(self.N), self.l))

    @property
    def points_window(self) -> Window:
        return Window(self.N2, self.N + self.g(self.N))

    def to_dict(self) -> dict:
        return {
            "sequence": self.seq.to_dict(),
            "points": self.points.to_dict(),
            "L": format_rational(self.L),
            "eps": format_rational(self.eps),
            "gap": self.g.to_dict(),
            "N1": str(self.N1),
            "N2": str(self.N2),
            "p": str(self.p),
        }


def abel_premise_holds(inst: AbelInstance, limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    """Check ``|s_i - s_n| <= eps/4`` on the Cauchy window and
    ``1/p <= 1 - x_m <= eps/(8 L N1)`` on the points window, plus ``|s_n| <= L``
    on every partial sum touched."""
    cw = inst.cauchy_window
    _guard(Window(0, cw.hi), limits, "Abel premise")
    quarter = inst.eps / 4
    lo = hi = None
    ilo = ihi = None
    for n, s in enumerate(inst.seq.iter_partial_sums(0, cw.hi)):
        if abs(s) > inst.L:
            return _fail(Violation("partial_sum_bound", (n,), abs(s), inst.L))
        if n < cw.lo:
            continue
        if lo is None or s < lo:
            lo, ilo = s, n
        if hi is None or s > hi:
            hi, ihi = s, n
    if hi - lo > quarter:
        return _fail(Violation("cauchy", (ihi, ilo), hi - lo, quarter))

    upper = inst.eps / (8 * inst.L * inst.N1)
    lower = Fraction(1, inst.p)
    pw = inst.points_window
    _guard(pw, limits, "Abel points")
    for m in pw:
        gap = 1 - inst.points(m)
        if gap < lower:
            return _fail(Violation("points_lower", (m,), lower, gap))
        if gap > upper:
            return _fail(Violation("points_upper", (m,), gap, upper))
    return CheckReport(True, checked={"cauchy_pairs": len(cw) ** 2, "points": len(pw)})


def abel_conclusion_holds(inst: AbelInstance, limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    """Check ``|F(x_m) - s_n| <= eps`` for all ``m, n`` in ``[N; N+g(N)]``.

    Also cross-checks ``|a_j| <= 2L`` on the window's prefix, the coefficient
    bound under which ``F`` is evaluated when the sequence declares none.
    """
    w = inst.window
    _guard(Window(0, w.hi), limits, "Abel conclusion")
    two_l = 2 * inst.L
    for j in range(w.hi + 1):
        a = inst.seq.coeff(j)
        if abs(a) > two_l:
            return _fail(Violation("coeff_bound", (j,), abs(a), two_l))
    bound = inst.seq.coeff_bound if inst.seq.coeff_bound is not None else two_l
    pred = JointAbel(inst.seq, inst.eps, inst.points, coeff_bound=bound)
    v = pred.check(w)
    if v is not None:
        return _fail(v)
    return CheckReport(True, checked={"pairs": pred.checked_pairs(w)})


@dataclass(frozen=True)
class TauberInstance:
    """Data of the finite Tauber theorem on the points ``v_n = 1 - 1/n``."""

    seq: CoefficientSequence
    L: Fraction
    eps: Fraction
    g: GapFunction
    N1: int
    N2: int

    def __post_init__(self):
        object.__setattr__(self, "L", as_rational(self.L))
        object.__setattr__(self, "eps", as_rational(self.eps))
        for name in ("N1", "N2"):
            object.__setattr__(self, name, as_natural(getattr(self, name)))
        if self.L <= 0:
            raise ConfigurationError(f"L must be positive, got {self.L}")
        if self.eps <= 0:
            raise ConfigurationError(f"eps must be positive, got {self.eps}")
        if self.N2 < 1:
            raise ConfigurationError("N2 must be at least 1: v_0 = 1 - 1/0 is undefined")

    @property
    def N(self) -> int:
        return max(ceil_q(2 * self.L * self.N1**2 / self.eps), self.N2)

    @property
    def p(self) -> int:
        return self.N + self.g(self.N)

    @property
    def l(self) -> int:
        p = self.p
        return omega(self.eps / (4 * self.L * p), p)

    @property
    def window(self) -> Window:
        return Window(self.N, self.p)

    @property
    def tail_window(self) -> Window:
        return Window(self.N1, self.l)

    @property
    def cauchy_window(self) -> Window:
        return Window(self.N2, self.p)

    def to_dict(self) -> dict:
        return {
            "sequence": self.seq.to_dict(),
            "L": format_rational(self.L),
            "eps": format_rational(self.eps),
            "gap": self.g.to_dict(),
            "N1": str(self.N1),
            "N2": str(self.N2),
        }


def _tauber_eval_bound(inst: TauberInstance) -> Fraction:
    return inst.seq.coeff_bound if inst.seq.coeff_bound is not None else inst.L


def tauber_premise_holds(inst: TauberInstance, limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    """Check ``i |a_i| <= eps/8`` on ``[N1; l]``, ``|a_i| <= L`` up to ``l``, and
    ``|F(v_m) - F(v_n)| <= eps/4`` on ``[N2; N+g(N)]``."""
    tw = inst.tail_window
    _guard(Window(0, tw.hi), limits, "Tauber premise")
    eighth = inst.eps / 8
    for i in range(tw.hi + 1):
        a = abs(inst.seq.coeff(i))
        if a > inst.L:
            return _fail(Violation("coeff_bound", (i,), a, inst.L))
        if i >= tw.lo and i * a > eighth:
            return _fail(Violation("tail", (i,), i * a, eighth))
    cw = inst.cauchy_window
    _guard(cw, limits, "Tauber F-Cauchy")
    pred = CauchyOfF(inst.seq, inst.eps / 4, V_POINTS, coeff_bound=_tauber_eval_bound(inst))
    v = pred.check(cw)
    if v is not None:
        return _fail(v)
    return CheckReport(True, checked={"tail": len(tw), "cauchy_pairs": pred.checked_pairs(cw)})


def tauber_conclusion_holds(inst: TauberInstance, limits: Limits = DEFAULT_LIMITS) -> CheckReport:
    """Check ``|F(v_m) - s_n| <= eps`` for all ``m, n`` in ``[N; N+g(N)]``."""
    w = inst.window
    _guard(w, limits, "Tauber conclusion")
    pred = JointAbel(inst.seq, inst.eps, V_POINTS, coeff_bound=_tauber_eval_bound(inst))
    v = pred.check(w)
    if v is not None:
        return _fail(v)
    return CheckReport(True, checked={"pairs": pred.checked_pairs(w)})


def check_abel(inst: AbelInstance, limits: Limits = DEFAULT_LIMITS) -> tuple[CheckReport, CheckReport]:
    """Run both Abel checkers; a verified premise with a failed conclusion raises."""
    premise = abel_premise_holds(inst, limits)
    conclusion = abel_conclusion_holds(inst, limits)
    if premise and not conclusion:
        raise SoundnessError(f"Abel premise verified but conclusion failed: {conclusion.violation}")
    return premise, conclusion


def check_tauber(inst: TauberInstance, limits: Limits = DEFAULT_LIMITS) -> tuple[CheckReport, CheckReport]:
    premise = tauber_premise_holds(inst, limits)
    conclusion = tauber_conclusion_holds(inst, limits)
    if premise and not conclusion:
        raise SoundnessError(f"Tauber premise verified but conclusion failed: {conclusion.violation}")
    return premise, conclusion
