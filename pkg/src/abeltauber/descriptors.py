"""JSON descriptors for sequences, bases, point families and predicates."""

from __future__ import annotations

from .errors import ConfigurationError
from .exact import as_rational
from .gaps import gap_from_dict  # noqa: F401  re-exported for scenario parsing
from .metastability import (
    CauchyOf,
    CauchyOfF,
    CauchyOfPartialSums,
    JointAbel,
    PointsNear1,
    SmallTailCoeff,
    WindowPredicate,
)
from . import series, specker
from .series import CoefficientSequence, PointFamily


def _kind(d, what: str) -> str:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigurationError(f"{what} descriptor must be an object with 'kind', got {d!r}")
    return d["kind"]


def _field(d: dict, name: str, what: str):
    if name not in d:
        raise ConfigurationError(f"{what} descriptor {d.get('kind')!r} is missing field {name!r}")
    return d[name]


def base_from_dict(d: dict) -> specker.BaseSequence:
    kind = _kind(d, "base")
    if kind == "dyadic_approach":
        return specker.dyadic_approach()
    if kind == "rational_approach":
        return specker.rational_approach()
    if kind == "table":
        return specker.table(_field(d, "values", "base"))
    raise ConfigurationError(f"unknown base kind {kind!r}")


def sequence_from_dict(d: dict) -> CoefficientSequence:
    kind = _kind(d, "sequence")
    if kind == "geometric":
        return series.geometric(_field(d, "ratio", "sequence"), d.get("scale", "1"))
    if kind == "alternating_harmonic":
        return series.alternating_harmonic()
    if kind == "power":
        return series.power(_field(d, "k", "sequence"))
    if kind == "zero":
        return series.zero()
    if kind == "constant":
        return series.constant(_field(d, "c", "sequence"))
    if kind == "finite":
        return series.finite(_field(d, "values", "sequence"))
    if kind == "specker_31":
        return specker.transform_31(base_from_dict(_field(d, "base", "sequence")))
    if kind == "specker_32":
        return specker.transform_32(base_from_dict(_field(d, "base", "sequence")))
    raise ConfigurationError(f"unknown sequence kind {kind!r}")


def points_from_dict(d: dict | None) -> PointFamily:
    if d is None:
        return series.V_POINTS
    kind = _kind(d, "points")
    if kind == "explicit":
        return PointFamily("explicit", tuple(_field(d, "values", "points")))
    return PointFamily(kind)


def predicate_from_dict(d: dict) -> WindowPredicate:
    kind = _kind(d, "predicate")
    eps = d.get("eps")
    if kind == "cauchy_partial_sums":
        return CauchyOfPartialSums(sequence_from_dict(_field(d, "sequence", "predicate")), as_rational(_field(d, "eps", "predicate")))
    if kind == "cauchy_values":
        desc = _field(d, "values", "predicate")
        base = base_from_dict(desc)
        return CauchyOf(base, as_rational(_field(d, "eps", "predicate")), descriptor=desc, label=base.label)
    if kind == "small_tail":
        return SmallTailCoeff(sequence_from_dict(_field(d, "sequence", "predicate")), as_rational(_field(d, "eps", "predicate")))
    if kind == "points_near_1":
        return PointsNear1(points_from_dict(d.get("points")), as_rational(_field(d, "delta", "predicate")))
    if kind in ("cauchy_abel", "joint_abel"):
        seq = sequence_from_dict(_field(d, "sequence", "predicate"))
        cls = CauchyOfF if kind == "cauchy_abel" else JointAbel
        return cls(seq, as_rational(eps if eps is not None else _field(d, "eps", "predicate")), points_from_dict(d.get("points")))
    raise ConfigurationError(f"unknown predicate kind {kind!r}")

