"""Coefficient sequences built from a monotone bounded rational base ``q_n``.

Two transforms: the plain difference sequence (``s_n = q_n``) and a spread
version whose terms satisfy the Tauber condition ``n |a_n| -> 0`` while
``s_{2^n} = q_{n+1}``. Any computable monotone bounded base is accepted;
genuine Specker sequences are not constructible in a terminating test.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ConfigurationError
from .exact import as_rational, ceil_log2, format_rational
from .series import CoefficientSequence


class MonotonicityError(ConfigurationError):
    pass


class BaseSequence:
    """Declared non-decreasing and bounded above by ``B``; both spot-checked on access."""

    def __init__(self, q: Callable[[int], Fraction], bound, descriptor: dict | None = None, label: str = "q"):
        self._q = q
        self.bound = as_rational(bound)
        self.descriptor = descriptor
        self.label = label
        self._cache: list[Fraction] = []
        self._lock = threading.Lock()

    def __call__(self, n: int) -> Fraction:
        if n < len(self._cache):
            return self._cache[n]
        with self._lock:
            while len(self._cache) <= n:
                i = len(self._cache)
                v = as_rational(self._q(i))
                if v > self.bound:
                    raise MonotonicityError(f"base {self.label}: q_{i} = {v} exceeds declared bound {self.bound}")
                if i and v < self._cache[-1]:
                    raise MonotonicityError(f"base {self.label}: q_{i} = {v} < q_{i - 1} = {self._cache[-1]}")
                self._cache.append(v)
        return self._cache[n]

    def __repr__(self) -> str:
        return f"BaseSequence({self.label})"

    def to_dict(self) -> dict:
        if self.descriptor is None:
            raise ConfigurationError(f"{self!r} was built from a callable and is not serializable")
        return dict(self.descriptor)


def dyadic_approach() -> BaseSequence:
    """``q_n = 1 - 2^-n``."""
    return BaseSequence(lambda n: 1 - Fraction(1, 1 << n), 1, {"kind": "dyadic_approach"}, "1-2^-n")


def rational_approach() -> BaseSequence:
    """``q_n = n / (n+1)``."""
    return BaseSequence(lambda n: Fraction(n, n + 1), 1, {"kind": "rational_approach"}, "n/(n+1)")


def table(values) -> BaseSequence:
    """``q_n = values[n]``, held at the last value afterwards."""
    vals = [as_rational(v) for v in values]
    if not vals:
        raise ConfigurationError("table base needs at least one value")
    desc = {"kind": "table", "values": [format_rational(v) for v in vals]}
    return BaseSequence(lambda n: vals[min(n, len(vals) - 1)], max(vals), desc, f"table(len={len(vals)})")


def _bounds(base: BaseSequence) -> tuple[Fraction, Fraction]:
    q0 = base(0)
    # |a_0| = |q_0|; later terms are increments of q, at most B - q_0 in total
    coeff_bound = max(abs(q0), base.bound - q0)
    psum_bound = max(abs(q0), abs(base.bound))
    return coeff_bound, psum_bound


def _descriptor(kind: str, base: BaseSequence) -> dict | None:
    try:
        return {"kind": kind, "base": base.to_dict()}
    except ConfigurationError:
        return None


def transform_31(base: BaseSequence) -> CoefficientSequence:
    """``a_0 = q_0``, ``a_{n+1} = q_{n+1} - q_n``; hence ``s_n = q_n``."""
    coeff_bound, psum_bound = _bounds(base)

    def coeff(i: int) -> Fraction:
        return base(0) if i == 0 else base(i) - base(i - 1)

    return CoefficientSequence(
        coeff,
        coeff_bound=coeff_bound,
        partial_sum_bound=psum_bound,
        label=f"specker_31({base.label})",
        descriptor=_descriptor("specker_31", base),
        partial_sum_fn=base,
    )


def spread_index(n: int) -> int:
    """``m = ceil(log2(n))`` for ``n >= 2``."""
    return ceil_log2(n)


def transform_32(base: BaseSequence) -> CoefficientSequence:
    """``a_0 = q_0``, ``a_1 = q_1 - q_0`` and ``a_n = (q_{m+1} - q_m) / 2^(m-1)``
    with ``m = ceil(log2 n)`` for ``n >= 2``."""
    coeff_bound, psum_bound = _bounds(base)

    def coeff(n: int) -> Fraction:
        if n == 0:
            return base(0)
        if n == 1:
            return base(1) - base(0)
        m = spread_index(n)
        return (base(m + 1) - base(m)) / (1 << (m - 1))

    def psum(n: int) -> Fraction:
        if n == 0:
            return base(0)
        if n == 1:
            return base(1)
        # blocks (2^(k-1), 2^k] each add q_{k+1} - q_k in equal parts
        m = spread_index(n)
        done = n - (1 << (m - 1))
        return base(m) + done * (base(m + 1) - base(m)) / (1 << (m - 1))

    return CoefficientSequence(
        coeff,
        coeff_bound=coeff_bound,
        partial_sum_bound=psum_bound,
        label=f"specker_32({base.label})",
        descriptor=_descriptor("specker_32", base),
        partial_sum_fn=psum,
    )


@dataclass
class TauberConditionReport:
    n_max: int
    checked: int
    passed: bool
    first_failure: int | None
    worst_ratio: Fraction | None

    def to_dict(self) -> dict:
        return {
            "n_max": str(self.n_max),
            "checked": str(self.checked),
            "passed": self.passed,
            "first_failure": None if self.first_failure is None else str(self.first_failure),
            "worst_ratio": None if self.worst_ratio is None else format_rational(self.worst_ratio),
        }


def check_tauber_condition_32(base: BaseSequence, n_max: int) -> TauberConditionReport:
    """Verify ``n |a_n| <= 2 (q_{m+1} - q_m)`` exactly for ``2 <= n <= n_max``.

    ``worst_ratio`` is the largest ``n |a_n| / (2 (q_{m+1} - q_m))`` over
    terms with a nonzero right side.
    """
    seq = transform_32(base)
    worst = None
    checked = 0
    for n in range(2, n_max + 1):
        m = spread_index(n)
        lhs = n * abs(seq.coeff(n))
        rhs = 2 * (base(m + 1) - base(m))
        checked += 1
        if lhs > rhs:
            return TauberConditionReport(n_max, checked, False, n, None if rhs == 0 else lhs / rhs)
        if rhs:
            r = lhs / rhs
            worst = r if worst is None or r > worst else worst
    return TauberConditionReport(n_max, checked, True, None, worst)
