"""Command-line entry point.

Every flag can also be set through an environment variable with the
``ABELTAUBER_`` prefix, e.g. ``ABELTAUBER_CAP=500`` or ``ABELTAUBER_JOBS=4``.
"""

from __future__ import annotations

import csv
import io
import sys

import click

from . import runner
from .errors import AbelTauberError, ConfigurationError
from .metastability import Certificate

ENV_PREFIX = "ABELTAUBER"


def render(certs: list[Certificate], fmt: str) -> str:
    if fmt == "json":
        return runner.dumps_certificates(certs)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=Certificate.CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for c in certs:
            writer.writerow(c.csv_row())
        return buf.getvalue()
    rows = [Certificate.CSV_COLUMNS] + [tuple(c.csv_row()[k] for k in Certificate.CSV_COLUMNS) for c in certs]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fail_config(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(3)


@click.group(context_settings={"auto_envvar_prefix": ENV_PREFIX})
@click.version_option(package_name="artifact", prog_name="abeltauber")
def main():
    """Finite Abel/Tauber checks, rate functionals and certificates."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(dir_okay=False), help="Scenario JSON file.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write output here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default=None, help="Output format (default: scenario's, else json).")
@click.option("--cap", type=click.IntRange(min=0), default=None, help="Override search cap for every scenario.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
def run(scenario_path, out, fmt, cap, jobs):
    """Run the scenarios in SCENARIO and emit certificates.

    Exit status: 0 pass, 1 a verdict failed, 2 cap or resource exhaustion,
    3 configuration error.
    """
    try:
        scenarios = runner.load_scenarios(scenario_path)
    except ConfigurationError as exc:
        _fail_config(exc)
    if cap is not None:
        scenarios = [{**sc, "cap": str(cap)} if isinstance(sc, dict) else sc for sc in scenarios]
    if fmt is None:
        first = scenarios[0] if scenarios and isinstance(scenarios[0], dict) else {}
        fmt = first.get("format", "json")
        if fmt not in ("json", "csv", "table"):
            _fail_config(ConfigurationError(f"scenarios[0].format: unknown format {fmt!r}"))
    certs = runner.run_batch(scenarios, jobs=jobs)
    _emit(render(certs, fmt), out)
    for i, c in enumerate(certs):
        if c.verdict in (runner.ERROR, runner.EXHAUSTED, runner.FAIL) and "message" in c.details:
            click.echo(f"scenarios[{i}]: {c.verdict}: {c.details['message']}", err=True)
    sys.exit(runner.status_of(certs))


@main.command("verify-cert")
@click.argument("cert_file", type=click.Path(dir_okay=False))
def verify_cert(cert_file):
    """Re-run every certificate in CERT_FILE and compare with the record."""
    try:
        certs = runner.load_certificates(cert_file)
    except ConfigurationError as exc:
        _fail_config(exc)
    mismatches = 0
    for i, cert in enumerate(certs):
        same, _ = runner.replay(cert)
        click.echo(f"certificate[{i}] {cert.kind}: {'replayed' if same else 'MISMATCH'} ({cert.verdict})")
        mismatches += not same
    sys.exit(1 if mismatches else 0)


@main.command()
@click.option("--theorem", type=click.Choice(["abel", "tauber"]), required=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=200, show_default=True, help="Premise-passing instances required.")
def fuzz(theorem, seed, count):
    """Soundness fuzz: premise-passing instances must satisfy the conclusion."""
    from .fuzz import soundness_fuzz

    try:
        stats = soundness_fuzz(theorem, seed, passing=count)
    except AbelTauberError as exc:
        click.echo(f"{theorem}: {type(exc).__name__}: {exc}", err=True)
        sys.exit(exc.exit_status)
    kinds = ", ".join(f"{k}={v}" for k, v in sorted(stats.passing_kinds.items()))
    click.echo(
        f"{theorem} seed={seed}: generated={stats.generated} premise={stats.premise_passed} "
        f"conclusion={stats.conclusion_passed} skipped={stats.skipped} [{kinds}]"
    )
    if stats.premise_passed < count:
        sys.exit(2)
    sys.exit(0 if stats.conclusion_passed == stats.premise_passed else 1)


if __name__ == "__main__":
    main()
