"""Scope selection and table assembly shared by the CLI and tests.

A "series" is one (state, locale) trajectory; the reserved pseudo-state
``IN-ALL`` is the household-weighted aggregate over all selected states,
and the pseudo-locale ``all`` aggregates urban plus rural.  Every command
works off the same selection logic so model tables, decomposition ledgers,
and decarbonization metrics line up row for row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import metrics as metrics_mod
from .decomposition import (
    ContributionLedger,
    DEFAULT_FACTOR_SET,
    DEFAULT_SEGMENTS,
    build_problem_from_breakdowns,
    decompose,
)
from .errors import ValidationError
from .ingest import LOCALES, PanelDataset
from .model import (
    ALL_LOCALES,
    IntensityBreakdown,
    aggregate,
    growth_stats,
    household_intensity,
)

AGGREGATE_STATE = "IN-ALL"

APPLIANCE_LABELS = ("room_ac", "fan", "air_cooler")


@dataclass(frozen=True)
class Scope:
    """Which slice of the panel a command operates on."""

    states: tuple[str, ...] | None = None
    locale: str = ALL_LOCALES       # "urban" | "rural" | "all"
    years: tuple[int, int] | None = None
    literal_iseer: bool = False
    factors: tuple[str, ...] = DEFAULT_FACTOR_SET
    segments: int = DEFAULT_SEGMENTS

    def locales(self) -> tuple[str, ...]:
        return LOCALES if self.locale == ALL_LOCALES else (self.locale,)


def select_years(dataset: PanelDataset, scope: Scope) -> list[int]:
    rng = dataset.year_range
    if rng is None:
        raise ValidationError("dataset is empty")
    lo, hi = scope.years if scope.years else rng
    if lo < rng[0] or hi > rng[1]:
        raise ValidationError(
            f"requested years {lo}:{hi} fall outside the dataset range {rng[0]}:{rng[1]}")
    if lo > hi:
        raise ValidationError(f"year range {lo}:{hi} is reversed")
    return list(range(lo, hi + 1))


def select_states(dataset: PanelDataset, scope: Scope) -> list[str]:
    available = dataset.states()
    if scope.states is None:
        return list(available)
    missing = [s for s in scope.states if s not in available]
    if missing:
        raise ValidationError(f"states not present in dataset: {missing}")
    return list(scope.states)


@dataclass
class BreakdownTable:
    """Per-(state, year, locale) breakdowns plus aggregate rows."""

    by_key: dict[tuple[str, int, str], IntensityBreakdown] = field(default_factory=dict)

    def get(self, state: str, year: int, locale: str) -> IntensityBreakdown:
        return self.by_key[(state, year, locale)]

    def series(self, state: str, locale: str) -> list[IntensityBreakdown]:
        rows = [b for (s, _, l), b in self.by_key.items() if s == state and l == locale]
        return sorted(rows, key=lambda b: b.year)

    def series_keys(self) -> list[tuple[str, str]]:
        return sorted({(s, l) for (s, _, l) in self.by_key})


def compute_breakdowns(dataset: PanelDataset, scope: Scope) -> BreakdownTable:
    """Evaluate the model over the scope and add IN-ALL / all-locale aggregates.

    Aggregates are produced at three levels: per-state across locales
    (``locale="all"``), across states per locale (``state="IN-ALL"``), and
    the national total (``IN-ALL``/``all``).
    """
    years = select_years(dataset, scope)
    states = select_states(dataset, scope)
    locales = scope.locales()
    table = BreakdownTable()
    matched = False
    for year in years:
        per_locale: dict[str, list[IntensityBreakdown]] = {l: [] for l in locales}
        per_state: dict[str, list[IntensityBreakdown]] = {s: [] for s in states}
        for state in states:
            for locale in locales:
                record = dataset.records.get((state, year, locale))
                if record is None:
                    continue
                matched = True
                b = household_intensity(record, literal_iseer=scope.literal_iseer)
                table.by_key[(state, year, locale)] = b
                per_locale[locale].append(b)
                per_state[state].append(b)
        for locale, rows in per_locale.items():
            if rows:
                table.by_key[(AGGREGATE_STATE, year, locale)] = aggregate(
                    rows, state=AGGREGATE_STATE, locale=locale)
        if len(locales) > 1:
            for state, rows in per_state.items():
                if len(rows) == len(locales):
                    table.by_key[(state, year, ALL_LOCALES)] = aggregate(
                        rows, state=state, locale=ALL_LOCALES)
            national = [b for rows in per_locale.values() for b in rows]
            if national:
                table.by_key[(AGGREGATE_STATE, year, ALL_LOCALES)] = aggregate(
                    national, state=AGGREGATE_STATE, locale=ALL_LOCALES)
    if not matched:
        raise ValidationError("selection matched zero records")
    return table


def intensity_rows(table: BreakdownTable) -> list[dict]:
    """Long-format model output: one row per appliance plus a total row."""
    rows: list[dict] = []
    for key in sorted(table.by_key):
        b = table.by_key[key]
        per_app = list(zip(APPLIANCE_LABELS, b.carbon_by_appliance(), b.energy_shares))
        hh = b.households
        for appliance, carbon, share in per_app:
            rows.append({
                "state": b.state, "year": b.year, "locale": b.locale,
                "appliance": appliance,
                "carbon_kg_per_household": carbon,
                "energy_kwh_per_household": (carbon / b.emission_factor)
                if b.emission_factor > 0 else 0.0,
                "energy_share": share,
            })
        rows.append({
            "state": b.state, "year": b.year, "locale": b.locale,
            "appliance": "total",
            "carbon_kg_per_household": b.c_total,
            "energy_kwh_per_household": b.energy_total / hh if hh > 0 else 0.0,
            "energy_share": 1.0,
        })
    rows.sort(key=lambda r: (r["state"], r["year"], r["locale"], r["appliance"]))
    return rows


def decompose_series(table: BreakdownTable, from_year: int, to_year: int,
                     scope: Scope) -> dict[tuple[str, str], ContributionLedger]:
    """One ledger per series for the from->to period."""
    ledgers: dict[tuple[str, str], ContributionLedger] = {}
    for state, locale in table.series_keys():
        start = table.by_key.get((state, from_year, locale))
        end = table.by_key.get((state, to_year, locale))
        if start is None or end is None:
            raise ValidationError(
                f"series {state}/{locale} lacks year {from_year if start is None else to_year}")
        problem = build_problem_from_breakdowns(
            start, end, factor_set=scope.factors, segments=scope.segments)
        ledgers[(state, locale)] = decompose(problem)
    return ledgers


def ledger_rows(ledgers: Mapping[tuple[str, str], ContributionLedger],
                from_year: int, to_year: int, factors: Sequence[str]) -> list[dict]:
    """Grouped contributions and contribution rates, one row per series.

    The rate convention is contribution over net change, so offsetting
    drivers can push individual rates above 1 or below 0.
    """
    rows = []
    for (state, locale) in sorted(ledgers):
        ledger = ledgers[(state, locale)]
        total = ledger.total_change
        row: dict = {
            "state": state, "locale": locale,
            "from_year": from_year, "to_year": to_year,
            "total_change_kg": total,
        }
        for f in factors:
            value = ledger.grouped.get(f, 0.0)
            row[f"contrib_{f}_kg"] = value
            row[f"rate_{f}"] = value / total if total != 0 else 0.0
        row["residual_kg"] = ledger.residual
        row["residual_rate"] = ledger.residual / total if total != 0 else 0.0
        rows.append(row)
    return rows


@dataclass(frozen=True)
class SeriesMetrics:
    state: str
    locale: str
    years: tuple[int, ...]
    yearly_decarb_intensity: tuple[float, ...]
    cumulative: tuple[metrics_mod.DecarbMetrics, ...]


def metrics_series(table: BreakdownTable, years: Sequence[int],
                   scope: Scope) -> dict[tuple[str, str], SeriesMetrics]:
    """Chained year-over-year ledgers folded into cumulative decarb metrics."""
    if len(years) < 2:
        raise ValidationError("metrics need at least two consecutive years")
    out: dict[tuple[str, str], SeriesMetrics] = {}
    for state, locale in table.series_keys():
        series = table.series(state, locale)
        by_year = {b.year: b for b in series}
        missing = [y for y in years if y not in by_year]
        if missing:
            raise ValidationError(f"series {state}/{locale} lacks years {missing}")
        entries: list[metrics_mod.YearlyEntry] = []
        yearly_dc: list[float] = []
        for prev_year, year in zip(years, years[1:]):
            problem = build_problem_from_breakdowns(
                by_year[prev_year], by_year[year],
                factor_set=scope.factors, segments=scope.segments)
            ledger = decompose(problem)
            dc = metrics_mod.decarb_intensity(ledger)
            yearly_dc.append(dc)
            b = by_year[year]
            entries.append(metrics_mod.YearlyEntry(
                year=year, ledger=ledger, households=b.households,
                emissions=b.emissions_total, nsdp=b.nsdp_inr))
        cumulative = metrics_mod.cumulative_series(entries)
        out[(state, locale)] = SeriesMetrics(
            state=state, locale=locale, years=tuple(years[1:]),
            yearly_decarb_intensity=tuple(yearly_dc), cumulative=tuple(cumulative))
    return out


def metrics_rows(per_series: Mapping[tuple[str, str], SeriesMetrics]) -> list[dict]:
    rows = []
    for (state, locale) in sorted(per_series):
        sm = per_series[(state, locale)]
        for year, dc, cum in zip(sm.years, sm.yearly_decarb_intensity, sm.cumulative):
            rows.append({
                "state": state, "locale": locale, "year": year,
                "decarb_intensity_kg": dc,
                "cum_decarb_intensity_kg": cum.decarb_intensity,
                "cum_total_decarb_mt": cum.total_decarb / metrics_mod.KG_PER_MEGATON,
                "cum_decarb_per_lakh_inr": cum.per_nsdp,
                "cum_efficiency": cum.efficiency,
            })
    return rows


def growth_summary(table: BreakdownTable, years: Sequence[int]) -> list[dict]:
    """Total growth and CAGR of carbon intensity per series over the scope."""
    first, last = years[0], years[-1]
    if first == last:
        return []
    rows = []
    for state, locale in table.series_keys():
        start = table.by_key.get((state, first, locale))
        end = table.by_key.get((state, last, locale))
        if start is None or end is None or start.c_total <= 0:
            continue
        stats = growth_stats(start.c_total, end.c_total, last - first)
        rows.append({
            "state": state, "locale": locale,
            "from_year": first, "to_year": last,
            "total_growth": stats.total_growth,
            "cagr": stats.cagr,
        })
    return rows
