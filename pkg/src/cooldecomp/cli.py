"""Batch command-line front end.

Subcommands: model (intensity tables), decompose (driver contributions),
metrics (decarbonization measures), report (charts plus their data), and
validate.  All table output is CSV with deterministic ordering; report
writes SVG figures next to the CSV data behind them.

Exit codes: 0 success, 1 validation failure, 2 computation failure,
3 I/O failure.  Output files are staged and committed together, so a
failing run leaves nothing behind.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import charts, workflows
from .decomposition import DEFAULT_SEGMENTS
from .errors import ComputationError, CooldecompError, ValidationError
from .ingest import load, validate as validate_dataset
from .model import ALL_LOCALES
from .workflows import Scope

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTATION = 2
EXIT_IO = 3

SEGMENTS_ENV = "COOLDECOMP_SEGMENTS"

# Column display kinds: kilogram-scale quantities print with one decimal by
# default (matching the usual reporting style); fractions get four.
_KG_DECIMALS = 1
_FRACTION_DECIMALS = 4
_KG_HINTS = ("_kg", "_kwh", "_mt", "_inr")


def _format_value(column: str, value, precision: int | None) -> str:
    if isinstance(value, float):
        if precision is not None:
            return f"{value:.{precision}f}"
        kg_like = any(hint in column for hint in _KG_HINTS)
        return f"{value:.{_KG_DECIMALS if kg_like else _FRACTION_DECIMALS}f}"
    return str(value)


def rows_to_csv(rows: list[dict], precision: int | None) -> bytes:
    if not rows:
        return b""
    columns = list(rows[0].keys())
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_value(c, row[c], precision) for c in columns))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_outputs(out_dir: Path, artifacts: dict[str, bytes]) -> None:
    """Two-phase write: stage everything, then rename; nothing partial."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[Path, Path]] = []
    try:
        for name, payload in artifacts.items():
            tmp = out_dir / (name + ".tmp")
            tmp.write_bytes(payload)
            staged.append((tmp, out_dir / name))
    except OSError:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _parse_years(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi))
    except ValueError:
        raise ValidationError(f"cannot parse year range {text!r}; expected A:B")


def _parse_states(text: str | None) -> tuple[str, ...] | None:
    if text is None:
        return None
    states = tuple(s.strip() for s in text.split(",") if s.strip())
    if not states:
        raise ValidationError("empty state list")
    return states


def _segments(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEGMENTS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"{SEGMENTS_ENV}={env!r} is not an integer")
    return DEFAULT_SEGMENTS


def common_options(f):
    f = click.option("--input", "input_path", required=True,
                     type=click.Path(), help="input panel CSV")(f)
    f = click.option("--out", "out_dir", required=True,
                     type=click.Path(), help="output directory")(f)
    f = click.option("--states", default=None, help="comma-separated state filter")(f)
    f = click.option("--locale", default=ALL_LOCALES,
                     type=click.Choice(["urban", "rural", ALL_LOCALES]))(f)
    f = click.option("--years", default=None, help="year range A:B")(f)
    f = click.option("--factors", default=",".join(("p", "n", "e", "k", "w")),
                     help="driver set for decomposition")(f)
    f = click.option("--segments", default=None, type=int,
                     help=f"integration segments (default {DEFAULT_SEGMENTS}; "
                          f"env {SEGMENTS_ENV})")(f)
    f = click.option("--eq2-literal", "literal_iseer", is_flag=True,
                     help="treat the AC efficiency rating as a multiplier")(f)
    f = click.option("--precision", default=None, type=int,
                     help="decimal places for all numeric output")(f)
    return f


def build_scope(states, locale, years, factors, segments, literal_iseer) -> Scope:
    return Scope(
        states=_parse_states(states),
        locale=locale,
        years=_parse_years(years),
        literal_iseer=literal_iseer,
        factors=tuple(f.strip() for f in factors.split(",") if f.strip()),
        segments=_segments(segments),
    )


@click.group()
def cli():
    """Residential space-cooling carbon intensity and decarbonization toolkit."""


@cli.command("model")
@common_options
def cmd_model(input_path, out_dir, states, locale, years, factors, segments,
              literal_iseer, precision):
    """Per-household intensity table with appliance split and aggregates."""
    scope = build_scope(states, locale, years, factors, segments, literal_iseer)
    dataset = load(input_path)
    table = workflows.compute_breakdowns(dataset, scope)
    rows = workflows.intensity_rows(table)
    growth = workflows.growth_summary(table, workflows.select_years(dataset, scope))
    artifacts = {"intensity.csv": rows_to_csv(rows, precision)}
    if growth:
        artifacts["growth.csv"] = rows_to_csv(growth, precision)
    write_outputs(Path(out_dir), artifacts)
    click.echo(f"wrote {len(rows)} intensity rows to {out_dir}/intensity.csv")


@cli.command("decompose")
@common_options
def cmd_decompose(input_path, out_dir, states, locale, years, factors, segments,
                  literal_iseer, precision):
    """Driver contributions to the intensity change between two years."""
    scope = build_scope(states, locale, years, factors, segments, literal_iseer)
    if scope.years is None:
        raise ValidationError("decompose requires --years FROM:TO")
    from_year, to_year = scope.years
    dataset = load(input_path)
    table = workflows.compute_breakdowns(dataset, scope)
    ledgers = workflows.decompose_series(table, from_year, to_year, scope)
    rows = workflows.ledger_rows(ledgers, from_year, to_year, scope.factors)
    write_outputs(Path(out_dir), {"contributions.csv": rows_to_csv(rows, precision)})
    click.echo(f"wrote {len(rows)} contribution rows to {out_dir}/contributions.csv")


@cli.command("metrics")
@common_options
def cmd_metrics(input_path, out_dir, states, locale, years, factors, segments,
                literal_iseer, precision):
    """Cumulative decarbonization metrics over chained yearly decompositions."""
    scope = build_scope(states, locale, years, factors, segments, literal_iseer)
    dataset = load(input_path)
    table = workflows.compute_breakdowns(dataset, scope)
    year_list = workflows.select_years(dataset, scope)
    per_series = workflows.metrics_series(table, year_list, scope)
    rows = workflows.metrics_rows(per_series)
    write_outputs(Path(out_dir), {"decarbonization.csv": rows_to_csv(rows, precision)})
    click.echo(f"wrote {len(rows)} metric rows to {out_dir}/decarbonization.csv")


FIGURE_KINDS = ("intensity", "contributions", "ranking", "efficiency")


@cli.command("report")
@common_options
@click.option("--figures", default=",".join(FIGURE_KINDS),
              help="which figures to render")
@click.option("--format", "fmt", default="svg", type=click.Choice(["csv", "svg"]),
              help="svg renders charts plus data; csv writes the data only")
def cmd_report(input_path, out_dir, states, locale, years, factors, segments,
               literal_iseer, precision, figures, fmt):
    """Render figures (intensity series, contribution bars, state ranking,
    efficiency curves) with the tables behind them."""
    scope = build_scope(states, locale, years, factors, segments, literal_iseer)
    kinds = tuple(k.strip() for k in figures.split(",") if k.strip())
    unknown = [k for k in kinds if k not in FIGURE_KINDS]
    if unknown:
        raise ValidationError(f"unknown figure kinds {unknown}; choose from {FIGURE_KINDS}")
    dataset = load(input_path)
    table = workflows.compute_breakdowns(dataset, scope)
    year_list = workflows.select_years(dataset, scope)
    if len(year_list) < 2:
        raise ValidationError("report needs at least two years of data")
    artifacts: dict[str, bytes] = {}

    if "intensity" in kinds:
        series = {
            f"{state}/{locale_}": [(b.year, b.c_total)
                                   for b in table.series(state, locale_)]
            for state, locale_ in table.series_keys()
            if state == workflows.AGGREGATE_STATE
        }
        rows = [{"series": label, "year": year, "carbon_kg": value}
                for label in sorted(series) for year, value in series[label]]
        artifacts["intensity.csv"] = rows_to_csv(rows, precision)
        if fmt == "svg":
            artifacts["intensity.svg"] = charts.intensity_chart(series)

    needs_ledgers = {"contributions", "ranking"} & set(kinds)
    if needs_ledgers:
        ledgers = workflows.decompose_series(table, year_list[0], year_list[-1], scope)
        ledger_rows = workflows.ledger_rows(
            ledgers, year_list[0], year_list[-1], scope.factors)
        if "contributions" in kinds:
            agg_rows = [r for r in ledger_rows if r["state"] == workflows.AGGREGATE_STATE]
            artifacts["contributions.csv"] = rows_to_csv(agg_rows, precision)
            if fmt == "svg":
                artifacts["contributions.svg"] = charts.contribution_chart(
                    agg_rows, scope.factors)
        if "ranking" in kinds:
            ranking = {
                f"{state}/{locale_}": ledger.total_change
                for (state, locale_), ledger in ledgers.items()
                if state != workflows.AGGREGATE_STATE and locale_ != ALL_LOCALES
            }
            rows = [{"series": label, "total_change_kg": value}
                    for label, value in sorted(ranking.items(), key=lambda kv: (-kv[1], kv[0]))]
            artifacts["ranking.csv"] = rows_to_csv(rows, precision)
            if fmt == "svg":
                artifacts["ranking.svg"] = charts.ranking_chart(
                    ranking, "intensity change (kgCO2/household)")

    if "efficiency" in kinds:
        per_series = workflows.metrics_series(table, year_list, scope)
        eff = {
            f"{state}/{locale_}": [(m.period[1], m.efficiency) for m in sm.cumulative]
            for (state, locale_), sm in per_series.items()
            if state == workflows.AGGREGATE_STATE
        }
        rows = [{"series": label, "year": year, "cum_efficiency": value}
                for label in sorted(eff) for year, value in eff[label]]
        artifacts["efficiency.csv"] = rows_to_csv(rows, precision)
        if fmt == "svg":
            artifacts["efficiency.svg"] = charts.efficiency_chart(eff)

    write_outputs(Path(out_dir), artifacts)
    click.echo(f"wrote {', '.join(sorted(artifacts))} to {out_dir}")


@cli.command("validate")
@click.option("--input", "input_path", required=True, type=click.Path())
def cmd_validate(input_path):
    """Check a panel file; exit 1 if it carries errors."""
    dataset = load(input_path)
    report = validate_dataset(dataset)
    for issue in report.entries:
        click.echo(f"{issue.severity}: {issue.key}: {issue.message}")
    if report.errors:
        raise ValidationError(f"{len(report.errors)} validation error(s)")
    click.echo(f"ok: {len(dataset)} records, "
               f"{len(report.warnings)} warning(s)")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except (ValidationError,) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except click.UsageError as exc:
        # Bad flags and missing arguments are user input problems.
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_VALIDATION
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except ComputationError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_COMPUTATION
    except CooldecompError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_VALIDATION
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
