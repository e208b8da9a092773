"""Coefficient sequences, partial sums and exact/certified power-series evaluation."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .errors import BoundViolation, ConfigurationError
from .exact import as_natural, as_rational, ceil_q, format_rational, omega

_COEFF_CACHE_LIMIT = 1 << 15
_CHECKPOINT_EVERY = 512


class CoefficientSequence:
    """A total map ``i -> a_i`` over the naturals with optional declared bounds.

    ``coeff_bound`` declares ``|a_i| <= L`` and ``partial_sum_bound`` declares
    ``|s_i| <= L``. Both are re-checked lazily on every index actually
    computed; a contradiction raises :class:`BoundViolation`.

    Builders may supply closed forms for the partial sums (``partial_sum_fn``)
    and for the generated function (``abel_fn``, ``x -> F(x)``). ``support``
    is an index ``K`` with ``a_i = 0`` for every ``i > K``, when known.
    """

    def __init__(
        self,
        coeff: Callable[[int], Fraction],
        *,
        coeff_bound=None,
        partial_sum_bound=None,
        label: str = "",
        descriptor: dict | None = None,
        partial_sum_fn: Callable[[int], Fraction] | None = None,
        abel_fn: Callable[[Fraction], Fraction] | None = None,
        support: int | None = None,
    ):
        self._coeff_fn = coeff
        self.coeff_bound = None if coeff_bound is None else as_rational(coeff_bound)
        self.partial_sum_bound = (
            None if partial_sum_bound is None else as_rational(partial_sum_bound)
        )
        self.label = label
        self.descriptor = descriptor
        self._partial_sum_fn = partial_sum_fn
        self._abel_fn = abel_fn
        self.support = support
        self._coeffs: list[Fraction] = []
        self._checkpoints: dict[int, Fraction] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"CoefficientSequence({self.label or 'anonymous'})"

    # -- coefficients -----------------------------------------------------

    def coeff(self, i: int) -> Fraction:
        if i < 0:
            raise ConfigurationError(f"negative coefficient index {i}")
        if i < len(self._coeffs):
            return self._coeffs[i]
        if self.support is not None and i > self.support:
            return Fraction(0)
        if i >= _COEFF_CACHE_LIMIT:
            return self._checked_coeff(i)
        with self._lock:
            while len(self._coeffs) <= i:
                self._coeffs.append(self._checked_coeff(len(self._coeffs)))
        return self._coeffs[i]

    def _checked_coeff(self, i: int) -> Fraction:
        a = as_rational(self._coeff_fn(i))
        if self.coeff_bound is not None and abs(a) > self.coeff_bound:
            raise BoundViolation("coefficient", i, a, self.coeff_bound)
        return a

    def __getitem__(self, i: int) -> Fraction:
        return self.coeff(i)

    def iter_coeffs(self, lo: int, hi: int) -> Iterator[Fraction]:
        for i in range(lo, hi + 1):
            yield self.coeff(i)

    # -- partial sums -----------------------------------------------------

    def _check_psum(self, n: int, s: Fraction) -> Fraction:
        if self.partial_sum_bound is not None and abs(s) > self.partial_sum_bound:
            raise BoundViolation("partial sum", n, s, self.partial_sum_bound)
        return s

    def partial_sum(self, n: int) -> Fraction:
        """``s_n = a_0 + ... + a_n``."""
        if n < 0:
            raise ConfigurationError(f"negative partial-sum index {n}")
        if self._partial_sum_fn is not None:
            return self._check_psum(n, as_rational(self._partial_sum_fn(n)))
        if self.support is not None and n > self.support:
            return self.partial_sum(self.support)
        start = n - n % _CHECKPOINT_EVERY
        while start > 0 and start not in self._checkpoints:
            start -= _CHECKPOINT_EVERY
        if start == 0 and 0 not in self._checkpoints:
            s = self._check_psum(0, self.coeff(0))
            with self._lock:
                self._checkpoints[0] = s
        s = self._checkpoints[start]
        for i in range(start + 1, n + 1):
            s += self.coeff(i)
            self._check_psum(i, s)
            if i % _CHECKPOINT_EVERY == 0:
                with self._lock:
                    self._checkpoints[i] = s
        return s

    def iter_partial_sums(self, lo: int, hi: int) -> Iterator[Fraction]:
        """Yield ``s_lo, ..., s_hi`` incrementally."""
        if hi < lo:
            return
        s = self.partial_sum(lo)
        yield s
        if self._partial_sum_fn is not None and self.support is None:
            # closed form available: still step incrementally, bound-check as we go
            for i in range(lo + 1, hi + 1):
                s += self.coeff(i)
                yield self._check_psum(i, s)
            return
        for i in range(lo + 1, hi + 1):
            if self.support is not None and i > self.support:
                yield s
                continue
            s += self.coeff(i)
            self._check_psum(i, s)
            if i % _CHECKPOINT_EVERY == 0 and i not in self._checkpoints:
                with self._lock:
                    self._checkpoints[i] = s
            yield s

    def verify_bounds(self, upto: int) -> None:
        """Spot-check both declared bounds on ``[0; upto]``."""
        for _ in self.iter_partial_sums(0, upto):
            pass
        for i in range(upto + 1):
            self.coeff(i)

    # -- generated function -----------------------------------------------

    def abel_value(self, x: Fraction) -> Fraction | None:
        """Exact ``F(x)`` when a closed form or finite support is known, else None."""
        x = as_rational(x)
        if self._abel_fn is not None:
            return as_rational(self._abel_fn(x))
        if self.support is not None:
            return eval_truncated(self, x, self.support)
        return None

    @property
    def has_exact_abel(self) -> bool:
        return self._abel_fn is not None or self.support is not None

    def to_dict(self) -> dict:
        if self.descriptor is None:
            raise ConfigurationError(f"sequence {self!r} was built from a callable and is not serializable")
        return dict(self.descriptor)


# -- builders ---------------------------------------------------------------


def geometric(ratio, scale=1) -> CoefficientSequence:
    """``a_i = scale * ratio**i`` for ``-1 < ratio < 1``; ``F(x) = scale / (1 - ratio*x)``."""
    r = as_rational(ratio)
    c = as_rational(scale)
    if not -1 < r < 1:
        raise ConfigurationError(f"geometric ratio must lie in (-1, 1), got {r}")
    psum_bound = abs(c) / (1 - r) if r >= 0 else abs(c)
    return CoefficientSequence(
        lambda i: c * r**i,
        coeff_bound=abs(c),
        partial_sum_bound=psum_bound,
        label=f"geometric({r}, scale={c})",
        descriptor={"kind": "geometric", "ratio": format_rational(r), "scale": format_rational(c)},
        partial_sum_fn=lambda n: c * (1 - r ** (n + 1)) / (1 - r),
        abel_fn=lambda x: c / (1 - r * x),
    )


def alternating_harmonic() -> CoefficientSequence:
    return CoefficientSequence(
        lambda i: Fraction((-1) ** i, i + 1),
        coeff_bound=1,
        partial_sum_bound=1,
        label="alternating_harmonic",
        descriptor={"kind": "alternating_harmonic"},
    )


def power(k: int) -> CoefficientSequence:
    """``a_i = 1 / (i+1)**k``."""
    k = as_natural(k)
    psum_bound = 1 + Fraction(1, k - 1) if k >= 2 else None
    return CoefficientSequence(
        lambda i: Fraction(1, (i + 1) ** k),
        coeff_bound=1,
        partial_sum_bound=psum_bound,
        label=f"power({k})",
        descriptor={"kind": "power", "k": k},
    )


def zero() -> CoefficientSequence:
    return CoefficientSequence(
        lambda i: Fraction(0),
        coeff_bound=0,
        partial_sum_bound=0,
        label="zero",
        descriptor={"kind": "zero"},
        partial_sum_fn=lambda n: Fraction(0),
        abel_fn=lambda x: Fraction(0),
    )


def constant(c) -> CoefficientSequence:
    c = as_rational(c)
    return CoefficientSequence(
        lambda i: c,
        coeff_bound=abs(c),
        label=f"constant({c})",
        descriptor={"kind": "constant", "c": format_rational(c)},
        partial_sum_fn=lambda n: c * (n + 1),
        abel_fn=lambda x: c / (1 - x),
    )


def finite(values) -> CoefficientSequence:
    """Finitely supported: ``a_i = values[i]`` and zero beyond."""
    vals = [as_rational(v) for v in values]
    if not vals:
        vals = [Fraction(0)]
    sums = []
    s = Fraction(0)
    for v in vals:
        s += v
        sums.append(s)
    return CoefficientSequence(
        lambda i: vals[i] if i < len(vals) else Fraction(0),
        coeff_bound=max(abs(v) for v in vals),
        partial_sum_bound=max(abs(t) for t in sums),
        label=f"finite(len={len(vals)})",
        descriptor={"kind": "finite", "values": [format_rational(v) for v in vals]},
        partial_sum_fn=lambda n: sums[min(n, len(sums) - 1)],
        support=len(vals) - 1,
    )


def from_callable(fn: Callable[[int], Fraction], **kwargs) -> CoefficientSequence:
    """Escape hatch for tests: any total ``int -> Fraction`` map. Not serializable."""
    kwargs.setdefault("label", getattr(fn, "__name__", "callable"))
    return CoefficientSequence(fn, **kwargs)


def from_partial_sums(values: Callable[[int], Fraction], **kwargs) -> CoefficientSequence:
    """Difference sequence of ``c``: ``a_0 = c_0``, ``a_n = c_n - c_{n-1}``, so ``s_n = c_n``."""

    def coeff(i: int) -> Fraction:
        if i == 0:
            return as_rational(values(0))
        return as_rational(values(i)) - as_rational(values(i - 1))

    kwargs.setdefault("label", "telescoping")
    return CoefficientSequence(coeff, partial_sum_fn=values, **kwargs)


# -- evaluation ---------------------------------------------------------------


def partial_sum(seq: CoefficientSequence, n: int) -> Fraction:
    return seq.partial_sum(n)


def eval_truncated(seq: CoefficientSequence, x, l: int) -> Fraction:
    """Exact ``F_l(x) = sum_{i<=l} a_i x**i`` by Horner's rule."""
    x = as_rational(x)
    if l < 0:
        return Fraction(0)
    top = l if seq.support is None else min(l, seq.support)
    if x == 0:
        return seq.coeff(0)
    acc = Fraction(0)
    for i in range(top, -1, -1):
        acc = acc * x + seq.coeff(i)
    return acc


@dataclass(frozen=True)
class EvalPoint:
    """A point ``x`` in the compact interval ``[0, 1 - 1/p]``."""

    x: Fraction
    p: int

    def __post_init__(self):
        object.__setattr__(self, "x", as_rational(self.x))
        if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 1:
            raise ConfigurationError(f"EvalPoint needs p >= 1, got {self.p!r}")
        if not 0 <= self.x <= 1 - Fraction(1, self.p):
            raise ConfigurationError(f"x = {self.x} is outside [0, 1 - 1/{self.p}]")

    @classmethod
    def tight(cls, x) -> EvalPoint:
        """Smallest admissible ``p`` for ``x``, i.e. ``ceil(1/(1-x))``."""
        x = as_rational(x)
        if not 0 <= x < 1:
            raise ConfigurationError(f"point {x} is outside [0, 1)")
        return cls(x, max(1, ceil_q(1 / (1 - x))))


def eval_certified(seq: CoefficientSequence, pt: EvalPoint, eps, coeff_bound=None) -> tuple[Fraction, int]:
    """Return ``(F_l(x), l)`` with ``|F(x) - F_l(x)| <= eps``.

    ``l = omega(eps / (L p), p)`` where ``L`` bounds ``|a_i|``; ``coeff_bound``
    overrides the sequence's declared bound.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise ConfigurationError(f"eval_certified needs eps > 0, got {eps}")
    bound = seq.coeff_bound if coeff_bound is None else as_rational(coeff_bound)
    if bound is None:
        raise ConfigurationError(f"{seq!r} declares no coefficient bound; certified evaluation impossible")
    if bound == 0:
        # every coefficient is zero, any truncation is exact
        l = omega(1, pt.p)
    else:
        l = omega(eps / (bound * pt.p), pt.p)
    return eval_truncated(seq, pt.x, l), l


def summation_by_parts(seq: CoefficientSequence, x, l: int) -> tuple[Fraction, Fraction]:
    """Both sides of ``F_l(x) = s_l x**l + (1-x) sum_{i<l} s_i x**i``."""
    x = as_rational(x)
    lhs = eval_truncated(seq, x, l)
    acc = Fraction(0)
    xi = Fraction(1)
    for s in seq.iter_partial_sums(0, l - 1):
        acc += s * xi
        xi *= x
    rhs = seq.partial_sum(l) * xi + (1 - x) * acc
    return lhs, rhs


@dataclass
class Enclosure:
    center: Fraction
    radius: Fraction
    l_used: int | None = None


def enclose_abel(seq: CoefficientSequence, x, delta, coeff_bound=None) -> Enclosure:
    """``F(x)`` as ``center +- radius``: exact when known, else certified to ``delta``."""
    x = as_rational(x)
    exact = seq.abel_value(x)
    if exact is not None:
        return Enclosure(exact, Fraction(0))
    value, l = eval_certified(seq, EvalPoint.tight(x), delta, coeff_bound=coeff_bound)
    return Enclosure(value, as_rational(delta), l)


# -- evaluation points --------------------------------------------------------


@dataclass(frozen=True)
class PointFamily:
    """An indexed family ``x_m`` in ``[0, 1)``.

    kinds: ``v`` (``1 - 1/m``, with ``x_0 = 0``), ``dyadic`` (``1 - 2**-m``),
    ``explicit`` (a finite table; indices past its end are an error).
    """

    kind: str = "v"
    values: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("v", "dyadic", "explicit"):
            raise ConfigurationError(f"unknown point family {self.kind!r}")
        if self.kind == "explicit":
            vals = tuple(as_rational(v) for v in self.values)
            for m, v in enumerate(vals):
                if not 0 <= v < 1:
                    raise ConfigurationError(f"explicit point x_{m} = {v} is outside [0, 1)")
            object.__setattr__(self, "values", vals)

    def __call__(self, m: int) -> Fraction:
        if self.kind == "v":
            return Fraction(0) if m == 0 else 1 - Fraction(1, m)
        if self.kind == "dyadic":
            return 1 - Fraction(1, 1 << m)
        if m >= len(self.values):
            raise ConfigurationError(f"explicit point family has no x_{m} (length {len(self.values)})")
        return self.values[m]

    def p_needed(self, m: int) -> int:
        """``ceil(1/(1-x_m))``, the least ``p`` with ``x_m <= 1 - 1/p``."""
        if self.kind == "v":
            return max(1, m)
        if self.kind == "dyadic":
            return 1 << m
        return max(1, ceil_q(1 / (1 - self(m))))

    def p_upto(self, top: int) -> int:
        """``ceil(max{1/(1-x_m) : m <= top})``."""
        if self.kind in ("v", "dyadic"):
            return self.p_needed(top)
        return max(self.p_needed(m) for m in range(top + 1))

    @property
    def is_v(self) -> bool:
        return self.kind == "v"

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "values": [format_rational(v) for v in self.values]}
        return {"kind": self.kind}


V_POINTS = PointFamily("v")
