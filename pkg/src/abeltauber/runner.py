"""Scenario execution: parse a JSON scenario, dispatch, emit a Certificate.

A scenario is a JSON object with a ``command`` and the descriptors that
command needs. Its own normalized form is stored in the certificate as
``inputs``, so replaying a certificate means running it again and comparing.

Exit statuses: 0 every verdict passes, 1 some verdict failed, 2 a search cap
or resource limit was hit, 3 configuration error. With mixed outcomes the
precedence is 1, then 3, then 2.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .descriptors import base_from_dict, gap_from_dict, points_from_dict, predicate_from_dict, sequence_from_dict
from .errors import AbelTauberError, ConfigurationError, ResourceLimitError, SoundnessError
from .exact import as_natural, as_rational, format_rational
from .gaps import OFFSET, Window, window_for
from .limits import Limits
from .metastability import Certificate, CauchyOfPartialSums, JointAbel, least_metastable_N
from .rates import abel_rate, gamma_bundle, tauber_rate
from .specker import check_tauber_condition_32, spread_index, transform_31, transform_32
from .theorems import AbelInstance, TauberInstance, check_abel, check_tauber

COMMANDS = ("check-abel", "check-tauber", "abel-rate", "tauber-rate", "gamma", "specker", "search-n")
OUTPUT_KEYS = ("format", "out", "label")

PASS, FAIL, EXHAUSTED, ERROR, PREMISE_UNMET = "pass", "fail", "exhausted", "error", "premise-unmet"
_STATUS = {PASS: 0, PREMISE_UNMET: 0, FAIL: 1, EXHAUSTED: 2, ERROR: 3}


def _get(sc: dict, key: str, where: str):
    if key not in sc:
        raise ConfigurationError(f"{where}: missing field {key!r}")
    return sc[key]


def _parse(where: str, key: str, fn, value):
    try:
        return fn(value)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{where}.{key}: {exc}") from None


def normalize(sc: dict) -> dict:
    """Scenario without output-only keys, round-tripped through JSON."""
    return json.loads(json.dumps({k: v for k, v in sc.items() if k not in OUTPUT_KEYS}, sort_keys=True))


def _limits(sc: dict, where: str) -> Limits:
    return _parse(where, "limits", Limits.from_dict, sc.get("limits"))


def _cap(sc: dict, limits: Limits, where: str) -> int:
    return _parse(where, "cap", as_natural, sc["cap"]) if "cap" in sc else limits.search_cap


def _instance_cert(kind: str, inst, premise, conclusion, inputs: dict) -> Certificate:
    w = inst.window
    if premise and conclusion:
        verdict = PASS
    elif premise:
        verdict = FAIL
    else:
        verdict = PREMISE_UNMET
    details = {
        "N": str(inst.N),
        "l": str(inst.l),
        "p": str(inst.p),
        "premise": premise.to_dict(),
        "conclusion": conclusion.to_dict(),
    }
    return Certificate(
        kind=kind,
        predicate={"kind": kind, **inst.to_dict()},
        eps=format_rational(inst.eps),
        gap=inst.g.to_dict(),
        found_N=inst.N,
        window=w,
        checked_pairs=int(conclusion.checked.get("pairs", 0)),
        bound_claimed=None,
        verdict=verdict,
        inputs=inputs,
        details=details,
    )


def _check_abel(sc, where, inputs):
    limits = _limits(sc, where)
    inst = AbelInstance(
        _parse(where, "sequence", sequence_from_dict, _get(sc, "sequence", where)),
        _parse(where, "points", points_from_dict, sc.get("points")),
        _parse(where, "L", as_rational, _get(sc, "L", where)),
        _parse(where, "eps", as_rational, _get(sc, "eps", where)),
        _parse(where, "gap", gap_from_dict, _get(sc, "gap", where)),
        _parse(where, "N1", as_natural, _get(sc, "N1", where)),
        _parse(where, "N2", as_natural, _get(sc, "N2", where)),
        _parse(where, "p", as_natural, _get(sc, "p", where)),
    )
    try:
        premise, conclusion = check_abel(inst, limits)
    except SoundnessError:
        from .theorems import abel_conclusion_holds, abel_premise_holds

        premise, conclusion = abel_premise_holds(inst, limits), abel_conclusion_holds(inst, limits)
    return _instance_cert("check-abel", inst, premise, conclusion, inputs)


def _check_tauber(sc, where, inputs):
    limits = _limits(sc, where)
    inst = TauberInstance(
        _parse(where, "sequence", sequence_from_dict, _get(sc, "sequence", where)),
        _parse(where, "L", as_rational, _get(sc, "L", where)),
        _parse(where, "eps", as_rational, _get(sc, "eps", where)),
        _parse(where, "gap", gap_from_dict, _get(sc, "gap", where)),
        _parse(where, "N1", as_natural, _get(sc, "N1", where)),
        _parse(where, "N2", as_natural, _get(sc, "N2", where)),
    )
    try:
        premise, conclusion = check_tauber(inst, limits)
    except SoundnessError:
        from .theorems import tauber_conclusion_holds, tauber_premise_holds

        premise, conclusion = tauber_premise_holds(inst, limits), tauber_conclusion_holds(inst, limits)
    return _instance_cert("check-tauber", inst, premise, conclusion, inputs)


def _rate(sc, where, inputs, which: str):
    limits = _limits(sc, where)
    cap = _cap(sc, limits, where)
    seq = _parse(where, "sequence", sequence_from_dict, _get(sc, "sequence", where))
    eps = _parse(where, "eps", as_rational, _get(sc, "eps", where))
    g = _parse(where, "gap", gap_from_dict, _get(sc, "gap", where))
    L = _parse(where, "L", as_rational, _get(sc, "L", where))
    if which == "abel":
        points = _parse(where, "points", points_from_dict, sc.get("points"))
        N, bundle = abel_rate(eps, g, L, seq, points, cap=cap, limits=limits)
    else:
        N, bundle = tauber_rate(eps, g, L, seq, cap=cap, limits=limits)
    details = bundle.to_dict()
    details["identities"] = bundle.identities()
    w = Window(N, N + g(N))
    verdict = PASS if all(bundle.identities().values()) else FAIL
    return Certificate(
        kind=f"{which}-rate",
        predicate={"kind": f"{which}_rate", "sequence": seq.to_dict(), "L": format_rational(L)},
        eps=format_rational(eps),
        gap=g.to_dict(),
        found_N=N,
        window=w,
        checked_pairs=len(w) ** 2,
        bound_claimed=None,
        verdict=verdict,
        inputs=inputs,
        details=details,
    )


def _gamma(sc, where, inputs):
    limits = _limits(sc, where)
    eps = _parse(where, "eps", as_rational, _get(sc, "eps", where))
    L = _parse(where, "L", as_rational, _get(sc, "L", where))
    g = _parse(where, "gap", gap_from_dict, _get(sc, "gap", where))
    bundle = gamma_bundle(eps, g, L, limits)
    details = bundle.to_dict()
    found = None
    window = None
    checked = 0
    verdict = PASS
    predicate = {"kind": "gamma_bound", "L": format_rational(L)}
    if "sequence" in sc:
        # brute-force oracle: least N <= Gamma with |F(v_m) - s_n| <= eps on [N; N+g(N)]
        seq = _parse(where, "sequence", sequence_from_dict, sc["sequence"])
        pred = JointAbel(seq, eps, points_from_dict(None))
        predicate = pred.to_dict() | {"L": format_rational(L)}
        cap = min(bundle.value, _cap(sc, limits, where)) if "cap" in sc else bundle.value
        found = least_metastable_N(pred, g, cap)
        if found is None:
            verdict = FAIL if cap == bundle.value else EXHAUSTED
        else:
            window = window_for(found, g)
            checked = pred.checked_pairs(window)
    return Certificate(
        kind="gamma",
        predicate=predicate,
        eps=format_rational(eps),
        gap=g.to_dict(),
        found_N=found,
        window=window,
        checked_pairs=checked,
        bound_claimed=bundle.value,
        verdict=verdict,
        inputs=inputs,
        details=details,
    )


def _specker(sc, where, inputs):
    base = _parse(where, "base", base_from_dict, _get(sc, "base", where))
    transform = str(sc.get("transform", "31"))
    n_max = _parse(where, "n_max", as_natural, sc.get("n_max", 64))
    details: dict = {"transform": transform}
    ok = True
    if transform == "31":
        seq = transform_31(base)
        s = 0
        bad = None
        for n in range(n_max + 1):
            s += seq.coeff(n)
            if s != base(n):
                bad = n
                break
        details["s_n = q_n"] = {"upto": str(n_max), "first_failure": None if bad is None else str(bad)}
        ok = bad is None
        checked = n_max + 1
    elif transform == "32":
        seq = transform_32(base)
        top = max(1, spread_index(max(n_max, 2)))
        s = 0
        bad = None
        idx = 0
        for k in range(1, top + 1):
            while idx <= 1 << k:
                s += seq.coeff(idx)
                idx += 1
            if s != base(k + 1):
                bad = k
                break
        report = check_tauber_condition_32(base, n_max)
        details["s_2^n = q_n+1"] = {"upto": str(top), "first_failure": None if bad is None else str(bad)}
        details["tauber_condition"] = report.to_dict()
        ok = bad is None and report.passed
        checked = top + report.checked
    else:
        raise ConfigurationError(f"{where}.transform: expected '31' or '32', got {transform!r}")
    return Certificate(
        kind="specker",
        predicate={"kind": f"specker_{transform}", "base": base.to_dict()},
        eps=None,
        gap=None,
        found_N=None,
        window=None,
        checked_pairs=checked,
        bound_claimed=None,
        verdict=PASS if ok else FAIL,
        inputs=inputs,
        details=details,
    )


def _search(sc, where, inputs):
    limits = _limits(sc, where)
    cap = _cap(sc, limits, where)
    g = _parse(where, "gap", gap_from_dict, _get(sc, "gap", where))
    convention = sc.get("convention", OFFSET)
    if "predicate" in sc:
        pred = _parse(where, "predicate", predicate_from_dict, sc["predicate"])
    else:
        seq = _parse(where, "sequence", sequence_from_dict, _get(sc, "sequence", where))
        pred = CauchyOfPartialSums(seq, _parse(where, "eps", as_rational, _get(sc, "eps", where)))
    found = least_metastable_N(pred, g, cap, convention=convention)
    window = None if found is None else window_for(found, g, convention)
    return Certificate(
        kind="search-n",
        predicate=pred.to_dict(),
        eps=format_rational(pred.eps),
        gap=g.to_dict(),
        found_N=found,
        window=window,
        checked_pairs=0 if window is None else pred.checked_pairs(window),
        bound_claimed=cap,
        verdict=PASS if found is not None else EXHAUSTED,
        inputs=inputs,
        details={"convention": convention, "cap": str(cap)},
    )


_DISPATCH = {
    "check-abel": _check_abel,
    "check-tauber": _check_tauber,
    "abel-rate": lambda sc, w, i: _rate(sc, w, i, "abel"),
    "tauber-rate": lambda sc, w, i: _rate(sc, w, i, "tauber"),
    "gamma": _gamma,
    "specker": _specker,
    "search-n": _search,
}


def _error_cert(sc: dict, inputs: dict, verdict: str, exc: Exception) -> Certificate:
    details = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ResourceLimitError) and exc.partial:
        details["partial"] = exc.partial
    return Certificate(
        kind=str(sc.get("command", "")) if isinstance(sc, dict) else "",
        predicate={},
        eps=None,
        gap=None,
        found_N=None,
        window=None,
        checked_pairs=0,
        bound_claimed=None,
        verdict=verdict,
        inputs=inputs,
        details=details,
    )


def run_scenario(sc: dict, where: str = "scenario") -> Certificate:
    """Run one scenario; errors become certificates with a non-pass verdict."""
    if not isinstance(sc, dict):
        return _error_cert({}, {}, ERROR, ConfigurationError(f"{where}: scenario must be a JSON object"))
    inputs = normalize(sc)
    try:
        command = _get(sc, "command", where)
        if command not in _DISPATCH:
            raise ConfigurationError(f"{where}.command: unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        return _DISPATCH[command](sc, where, inputs)
    except ResourceLimitError as exc:
        return _error_cert(sc, inputs, EXHAUSTED, exc)
    except SoundnessError as exc:
        return _error_cert(sc, inputs, FAIL, exc)
    except AbelTauberError as exc:
        return _error_cert(sc, inputs, ERROR, exc)
    except (ValueError, TypeError, KeyError) as exc:
        return _error_cert(sc, inputs, ERROR, ConfigurationError(f"{where}: {exc}"))


def status_of(certs) -> int:
    codes = {_STATUS.get(c.verdict, 3) for c in certs}
    for code in (1, 3, 2):
        if code in codes:
            return code
    return 0


def load_scenarios(path: str | Path) -> list[dict]:
    """A file holds one scenario object, a list, or ``{"defaults": {...}, "scenarios": [...]}``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror}") from None
    if isinstance(data, list):
        return data
    if isinstance(data, dict) and "scenarios" in data:
        defaults = data.get("defaults", {})
        return [{**defaults, **sc} if isinstance(sc, dict) else sc for sc in data["scenarios"]]
    return [data]


def _run_indexed(args) -> dict:
    i, sc = args
    return run_scenario(sc, f"scenarios[{i}]").to_dict()


def run_batch(scenarios: list[dict], jobs: int = 1) -> list[Certificate]:
    """Run scenarios, in a process pool when ``jobs > 1``; output order is input order."""
    items = list(enumerate(scenarios))
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            dicts = list(pool.map(_run_indexed, items))
    else:
        dicts = [_run_indexed(item) for item in items]
    return [Certificate.from_dict(d) for d in dicts]


def replay(cert: Certificate) -> tuple[bool, Certificate]:
    """Re-run the certificate's recorded inputs and compare the records."""
    again = run_scenario(cert.inputs)
    return again.to_dict() == cert.to_dict(), again


def dumps_certificates(certs) -> str:
    return json.dumps({"certificates": [c.to_dict() for c in certs]}, sort_keys=True, indent=2) + "\n"


def load_certificates(path: str | Path) -> list[Certificate]:
    try:
        data = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigurationError(f"{path}: cannot read certificates: {exc}") from None
    if isinstance(data, dict) and "certificates" in data:
        data = data["certificates"]
    if isinstance(data, dict):
        data = [data]
    return [Certificate.from_dict(d) for d in data]
