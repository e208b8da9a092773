"""Exact rational helpers and the tail-exponent function ``omega``.

Rationals are :class:`fractions.Fraction` throughout; naturals are plain
Python ``int`` (arbitrary precision, never truncated).
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import ConfigurationError

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
_NATURAL_RE = re.compile(r"^\s*\+?(\d+)\s*$")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are rejected: the core never touches binary floating point.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise ConfigurationError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ConfigurationError(f"malformed rational {text!r}; expected 'a/b' or 'a'")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ConfigurationError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Canonical text form: ``"num/den"``, or ``"num"`` when the denominator is 1."""
    return str(Fraction(q))


def as_natural(value) -> int:
    if isinstance(value, bool):
        raise ConfigurationError(f"not a natural number: {value!r}")
    if isinstance(value, int):
        n = value
    elif isinstance(value, str):
        m = _NATURAL_RE.match(value)
        if m is None:
            raise ConfigurationError(f"malformed natural {value!r}")
        n = int(m.group(1))
    else:
        raise ConfigurationError(f"not a natural number: {value!r}")
    if n < 0:
        raise ConfigurationError(f"natural number expected, got {n}")
    return n


def format_natural(n: int) -> str:
    return str(int(n))


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def ceil_q(q: Fraction) -> int:
    """Ceiling of a rational, as an int."""
    q = Fraction(q)
    return ceil_div(q.numerator, q.denominator)


def ceil_log2(q) -> int:
    """Least integer ``k`` with ``2**k >= q``, computed with integer comparisons only."""
    q = as_rational(q)
    if q <= 0:
        raise ConfigurationError(f"ceil_log2 needs q > 0, got {q}")
    n, d = q.numerator, q.denominator

    def covers(k: int) -> bool:
        # 2**k >= n/d
        if k >= 0:
            return d << k >= n
        return d >= n << (-k)

    k = n.bit_length() - d.bit_length()
    while not covers(k):
        k += 1
    while covers(k - 1):
        k -= 1
    return k


def omega(eps, p: int) -> int:
    """Canonical exponent with ``omega(eps, p) >= p`` and ``x**l <= eps``
    for every ``x`` in ``[0, 1 - 1/p]`` and ``l >= omega(eps, p)``.

    Instantiated as ``p * max(1, ceil_log2(1/eps))``; since ``log2 >= ln`` on
    ``[1, inf)`` and ``(1 - 1/p)**p <= 1/e``, this meets both requirements.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise ConfigurationError(f"omega needs eps > 0, got {eps}")
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ConfigurationError(f"omega needs an integer p >= 1, got {p!r}")
    return p * max(1, ceil_log2(1 / eps))
