"""Gap functions ``g: N -> N`` as serializable expressions, and windows ``[n; k]``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import ConfigurationError
from .exact import as_natural


class GapFunction:
    """Total map from naturals to naturals. Subclasses are immutable."""

    def __call__(self, n: int) -> int:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class Constant(GapFunction):
    c: int

    def __post_init__(self):
        object.__setattr__(self, "c", as_natural(self.c))

    def __call__(self, n: int) -> int:
        return self.c

    def to_dict(self) -> dict:
        return {"kind": "constant", "c": self.c}

    def describe(self) -> str:
        return f"{self.c}"


@dataclass(frozen=True)
class Linear(GapFunction):
    """``a*n + b``."""

    a: int
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", as_natural(self.a))
        object.__setattr__(self, "b", as_natural(self.b))

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def to_dict(self) -> dict:
        return {"kind": "linear", "a": self.a, "b": self.b}

    def describe(self) -> str:
        return f"{self.a}n+{self.b}"


@dataclass(frozen=True)
class Polynomial(GapFunction):
    """``sum coeffs[k] * n**k`` with natural coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_natural(c) for c in self.coeffs))

    def __call__(self, n: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def to_dict(self) -> dict:
        return {"kind": "polynomial", "coeffs": list(self.coeffs)}

    def describe(self) -> str:
        return "+".join(f"{c}n^{k}" for k, c in enumerate(self.coeffs) if c) or "0"


@dataclass(frozen=True)
class Compose(GapFunction):
    """``outer(inner(n))``."""

    outer: GapFunction
    inner: GapFunction

    def __call__(self, n: int) -> int:
        return self.outer(self.inner(n))

    def to_dict(self) -> dict:
        return {"kind": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}

    def describe(self) -> str:
        return f"({self.outer.describe()})o({self.inner.describe()})"


@dataclass(frozen=True)
class PointwiseMax(GapFunction):
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ConfigurationError("max gap needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def __call__(self, n: int) -> int:
        return max(part(n) for part in self.parts)

    def to_dict(self) -> dict:
        return {"kind": "max", "parts": [p.to_dict() for p in self.parts]}

    def describe(self) -> str:
        return "max(" + ",".join(p.describe() for p in self.parts) + ")"


@dataclass(frozen=True)
class Table(GapFunction):
    """``values[n]`` for ``n < len(values)``, ``default`` afterwards."""

    values: tuple
    default: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_natural(v) for v in self.values))
        object.__setattr__(self, "default", as_natural(self.default))

    def __call__(self, n: int) -> int:
        return self.values[n] if n < len(self.values) else self.default

    def to_dict(self) -> dict:
        return {"kind": "table", "values": list(self.values), "default": self.default}

    def describe(self) -> str:
        return f"table{list(self.values)}"


class CallableGap(GapFunction):
    """Opaque callable; for tests and internal helpers only (not serializable)."""

    def __init__(self, fn: Callable[[int], int], label: str = "callable"):
        self.fn = fn
        self.label = label

    def __call__(self, n: int) -> int:
        v = self.fn(n)
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ConfigurationError(f"gap {self.label} returned {v!r} at n={n}; expected a natural")
        return v

    def to_dict(self) -> dict:
        raise ConfigurationError(f"gap {self.label} is an opaque callable and cannot be serialized")

    def describe(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"CallableGap({self.label})"


def gap_from_dict(d: dict) -> GapFunction:
    if isinstance(d, GapFunction):
        return d
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigurationError(f"gap descriptor must be an object with 'kind', got {d!r}")
    kind = d["kind"]
    try:
        if kind == "constant":
            return Constant(d.get("c", 0))
        if kind == "linear":
            return Linear(d.get("a", 1), d.get("b", 0))
        if kind == "identity":
            return Linear(1, 0)
        if kind == "polynomial":
            return Polynomial(tuple(d["coeffs"]))
        if kind == "compose":
            return Compose(gap_from_dict(d["outer"]), gap_from_dict(d["inner"]))
        if kind == "max":
            return PointwiseMax(tuple(gap_from_dict(p) for p in d["parts"]))
        if kind == "table":
            return Table(tuple(d["values"]), d.get("default", 0))
    except KeyError as exc:
        raise ConfigurationError(f"gap descriptor {kind!r} is missing field {exc}") from None
    raise ConfigurationError(f"unknown gap kind {kind!r}")


def shifted(g: GapFunction) -> GapFunction:
    """``n + g(n)``."""
    return CallableGap(lambda n: n + g(n), label=f"n+({g.describe()})")


@dataclass(frozen=True)
class Window:
    """Inclusive integer interval ``[lo; hi]``; empty when ``hi < lo``."""

    lo: int
    hi: int

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    @property
    def empty(self) -> bool:
        return self.hi < self.lo

    def issubset(self, other: Window) -> bool:
        return self.empty or (other.lo <= self.lo and self.hi <= other.hi)

    def to_list(self) -> list:
        return [str(self.lo), str(self.hi)]


OFFSET = "offset"  # [N; N + g(N)]
ABSOLUTE = "absolute"  # [n; g(n)]


def window_for(n: int, g: GapFunction, convention: str = OFFSET) -> Window:
    """The window a gap assigns to ``n`` under either bracket convention."""
    if convention == OFFSET:
        return Window(n, n + g(n))
    if convention == ABSOLUTE:
        return Window(n, g(n))
    raise ConfigurationError(f"unknown window convention {convention!r}")
