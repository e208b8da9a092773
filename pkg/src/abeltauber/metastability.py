"""Window predicates, the brute-force least-N oracle, and counterexample gaps.

Predicates mentioning ``F`` cannot evaluate it exactly in general. They use
enclosures ``F(x) in [c - r, c + r]`` (exact when a closed form is known)
and only ever return a *pass* when the enclosures prove the inequality; a
*fail* is reported when they disprove it. In between the accuracy is halved
and the check repeated, up to ``max_refinements`` times, after which the
verdict is a fail flagged ``undecided``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConfigurationError
from .exact import as_rational, format_rational
from .gaps import OFFSET, GapFunction, Table, Window, window_for
from .series import CoefficientSequence, Enclosure, PointFamily, enclose_abel

DEFAULT_REFINEMENTS = 6


@dataclass
class Violation:
    """A concrete failure witness: ``lhs <= rhs`` was required at ``indices``."""

    clause: str
    indices: tuple
    lhs: Fraction
    rhs: Fraction
    undecided: bool = False

    def to_dict(self) -> dict:
        return {
            "clause": self.clause,
            "indices": [str(i) for i in self.indices],
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "undecided": self.undecided,
        }


def _extrema(values):
    """(min, argmin, max, argmax) over an iterable of ``(index, value)``."""
    lo = hi = None
    ilo = ihi = None
    for i, v in values:
        if lo is None or v < lo:
            lo, ilo = v, i
        if hi is None or v > hi:
            hi, ihi = v, i
    return lo, ilo, hi, ihi


class AbelCache:
    """Per-sequence memo of ``F(x_m)`` enclosures, keeping the tightest seen."""

    def __init__(self, seq: CoefficientSequence, points: PointFamily, coeff_bound=None):
        self.seq = seq
        self.points = points
        self.coeff_bound = coeff_bound
        self._store: dict[int, Enclosure] = {}

    def get(self, m: int, delta: Fraction) -> Enclosure:
        e = self._store.get(m)
        if e is not None and e.radius <= delta:
            return e
        e = enclose_abel(self.seq, self.points(m), delta, coeff_bound=self.coeff_bound)
        self._store[m] = e
        return e


class WindowPredicate:
    """Decidable property of a finite window. ``check`` returns a Violation or None."""

    eps: Fraction
    pairwise = True

    def check(self, w: Window) -> Violation | None:
        raise NotImplementedError

    def holds_on(self, w: Window) -> bool:
        return self.check(w) is None

    def checked_pairs(self, w: Window) -> int:
        return len(w) ** 2 if self.pairwise else len(w)

    def to_dict(self) -> dict:
        raise NotImplementedError


class CauchyOf(WindowPredicate):
    """``|c_m - c_n| <= eps`` for all ``m, n`` in the window, for any exact sequence ``c``."""

    def __init__(self, values: Callable[[int], Fraction], eps, descriptor: dict | None = None, label: str = "c"):
        self.values = values
        self.eps = as_rational(eps)
        self.descriptor = descriptor
        self.label = label

    def _iter(self, w: Window):
        for n in w:
            yield n, as_rational(self.values(n))

    def check(self, w: Window) -> Violation | None:
        if w.empty:
            return None
        lo, ilo, hi, ihi = _extrema(self._iter(w))
        if hi - lo > self.eps:
            return Violation(f"cauchy({self.label})", (ihi, ilo), hi - lo, self.eps)
        return None

    def to_dict(self) -> dict:
        if self.descriptor is None:
            raise ConfigurationError("CauchyOf over a callable is not serializable")
        return {"kind": "cauchy_values", "values": self.descriptor, "eps": format_rational(self.eps)}


class CauchyOfPartialSums(CauchyOf):
    """``|s_m - s_n| <= eps`` on the window."""

    def __init__(self, seq: CoefficientSequence, eps):
        super().__init__(seq.partial_sum, eps, label="s")
        self.seq = seq

    def _iter(self, w: Window):
        return zip(w, self.seq.iter_partial_sums(w.lo, w.hi))

    def to_dict(self) -> dict:
        return {"kind": "cauchy_partial_sums", "sequence": self.seq.to_dict(), "eps": format_rational(self.eps)}


class SmallTailCoeff(WindowPredicate):
    """``i |a_i| <= eps`` for every ``i`` in the window."""

    pairwise = False

    def __init__(self, seq: CoefficientSequence, eps):
        self.seq = seq
        self.eps = as_rational(eps)

    def check(self, w: Window) -> Violation | None:
        for i in w:
            v = i * abs(self.seq.coeff(i))
            if v > self.eps:
                return Violation("tail", (i,), v, self.eps)
        return None

    def to_dict(self) -> dict:
        return {"kind": "small_tail", "sequence": self.seq.to_dict(), "eps": format_rational(self.eps)}


class PointsNear1(WindowPredicate):
    """``1 - delta <= x_m`` for every ``m`` in the window."""

    pairwise = False

    def __init__(self, points: PointFamily, delta):
        self.points = points
        self.eps = as_rational(delta)

    def check(self, w: Window) -> Violation | None:
        floor = 1 - self.eps
        if floor <= 0:
            return None
        for m in w:
            x = self.points(m)
            if x < floor:
                return Violation("points_near_1", (m,), floor, x)
        return None

    def to_dict(self) -> dict:
        return {"kind": "points_near_1", "points": self.points.to_dict(), "delta": format_rational(self.eps)}


class CauchyOfF(WindowPredicate):
    """``|F(x_m) - F(x_n)| <= eps`` on the window, decided through enclosures."""

    def __init__(
        self,
        seq: CoefficientSequence,
        eps,
        points: PointFamily,
        *,
        margin=None,
        coeff_bound=None,
        max_refinements: int = DEFAULT_REFINEMENTS,
    ):
        self.seq = seq
        self.eps = as_rational(eps)
        self.points = points
        self.margin = self.eps / 8 if margin is None else as_rational(margin)
        self.max_refinements = max_refinements
        self.cache = AbelCache(seq, points, coeff_bound)

    def check(self, w: Window) -> Violation | None:
        if w.empty:
            return None
        delta = self.margin
        for _ in range(self.max_refinements + 1):
            encs = [(m, self.cache.get(m, delta)) for m in w]
            upper = max(encs, key=lambda t: t[1].center + t[1].radius)
            lower = min(encs, key=lambda t: t[1].center - t[1].radius)
            spread_hi = (upper[1].center + upper[1].radius) - (lower[1].center - lower[1].radius)
            if spread_hi <= self.eps:
                return None
            top = max(encs, key=lambda t: t[1].center - t[1].radius)
            bot = min(encs, key=lambda t: t[1].center + t[1].radius)
            spread_lo = (top[1].center - top[1].radius) - (bot[1].center + bot[1].radius)
            if spread_lo > self.eps:
                return Violation("cauchy(F)", (top[0], bot[0]), spread_lo, self.eps)
            delta /= 2
        return Violation("cauchy(F)", (upper[0], lower[0]), spread_hi, self.eps, undecided=True)

    def to_dict(self) -> dict:
        return {
            "kind": "cauchy_abel",
            "sequence": self.seq.to_dict(),
            "points": self.points.to_dict(),
            "eps": format_rational(self.eps),
        }


class JointAbel(WindowPredicate):
    """``|F(x_m) - s_n| <= eps`` for all ``m, n`` in the window."""

    def __init__(
        self,
        seq: CoefficientSequence,
        eps,
        points: PointFamily,
        *,
        margin=None,
        coeff_bound=None,
        max_refinements: int = DEFAULT_REFINEMENTS,
    ):
        self.seq = seq
        self.eps = as_rational(eps)
        self.points = points
        self.margin = self.eps / 8 if margin is None else as_rational(margin)
        self.max_refinements = max_refinements
        self.cache = AbelCache(seq, points, coeff_bound)

    def check(self, w: Window) -> Violation | None:
        if w.empty:
            return None
        smin, nmin, smax, nmax = _extrema(zip(w, self.seq.iter_partial_sums(w.lo, w.hi)))
        for m in w:
            delta = self.margin
            for _ in range(self.max_refinements + 1):
                e = self.cache.get(m, delta)
                far, n = (abs(e.center - smin), nmin)
                if abs(e.center - smax) > far:
                    far, n = (abs(e.center - smax), nmax)
                if far + e.radius <= self.eps:
                    break
                if far - e.radius > self.eps:
                    return Violation("joint", (m, n), far - e.radius, self.eps)
                delta /= 2
            else:
                return Violation("joint", (m, n), far + e.radius, self.eps, undecided=True)
        return None

    def to_dict(self) -> dict:
        return {
            "kind": "joint_abel",
            "sequence": self.seq.to_dict(),
            "points": self.points.to_dict(),
            "eps": format_rational(self.eps),
        }


def holds_on(pred: WindowPredicate, w: Window) -> bool:
    return pred.holds_on(w)


def least_metastable_N(
    pred: WindowPredicate,
    g: GapFunction,
    search_cap: int,
    convention: str = OFFSET,
    start: int = 0,
) -> int | None:
    """Least ``N`` in ``[start; search_cap]`` whose window (per ``convention``) satisfies ``pred``.

    Returns None when the cap is exhausted. This is the brute-force oracle
    every closed-form bound is judged against.
    """
    for n in range(start, search_cap + 1):
        if pred.holds_on(window_for(n, g, convention)):
            return n
    return None


def counterexample_gap(pred: WindowPredicate, n_max: int, k_max: int) -> Table | None:
    """Table gap ``g`` with ``not pred([n; g(n)])`` for every ``n <= n_max``, or None.

    For each ``n`` the least failing ``k <= k_max`` is taken; if some ``n``
    has no failing ``k`` in range there is no witness on this truncation.
    """
    values = []
    for n in range(n_max + 1):
        for k in range(n, k_max + 1):
            if not pred.holds_on(Window(n, k)):
                values.append(k)
                break
        else:
            return None
    return Table(tuple(values))


@dataclass
class Certificate:
    """Replayable record of one verified claim.

    ``inputs`` holds everything needed to recompute the verdict; ``details``
    carries the intermediate quantities and witnesses.
    """

    kind: str
    predicate: dict
    eps: str | None
    gap: dict | None
    found_N: int | None
    window: Window | None
    checked_pairs: int
    bound_claimed: int | None
    verdict: str
    inputs: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "predicate": self.predicate,
            "eps": self.eps,
            "gap": self.gap,
            "found_N": None if self.found_N is None else str(self.found_N),
            "window": None if self.window is None else self.window.to_list(),
            "checked_pairs": str(self.checked_pairs),
            "bound_claimed": None if self.bound_claimed is None else str(self.bound_claimed),
            "verdict": self.verdict,
            "inputs": self.inputs,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        try:
            window = None if d["window"] is None else Window(int(d["window"][0]), int(d["window"][1]))
            return cls(
                kind=d["kind"],
                predicate=d["predicate"],
                eps=d["eps"],
                gap=d["gap"],
                found_N=None if d["found_N"] is None else int(d["found_N"]),
                window=window,
                checked_pairs=int(d["checked_pairs"]),
                bound_claimed=None if d["bound_claimed"] is None else int(d["bound_claimed"]),
                verdict=d["verdict"],
                inputs=d.get("inputs", {}),
                details=d.get("details", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed certificate: {exc}") from None

    CSV_COLUMNS = ("predicate", "eps", "gap", "N_found", "bound", "verdict")

    def csv_row(self) -> dict:
        pred = self.predicate.get("kind", "") if isinstance(self.predicate, dict) else str(self.predicate)
        gap = "" if self.gap is None else _compact(self.gap)
        return {
            "predicate": pred,
            "eps": self.eps or "",
            "gap": gap,
            "N_found": "" if self.found_N is None else str(self.found_N),
            "bound": "" if self.bound_claimed is None else str(self.bound_claimed),
            "verdict": self.verdict,
        }


def _compact(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"))
