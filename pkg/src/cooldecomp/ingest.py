"""Loading, validation, unit normalization, and gap filling for the panel.

The input format is UTF-8 comma-separated text with a mandatory header row
and a schema pragma on the first line (``# cooldecomp-schema v1``).  All
values are normalized to canonical units at ingestion: appliance counts per
100 households become counts per household, tCO2/kWh emission factors
become kgCO2/kWh, and lakh-rupee NSDP becomes rupees.  Downstream modules
never convert units.

Loading collects every problem it finds (unknown columns, missing
mandatory columns, non-numeric cells, duplicate keys) and rejects the file
with the full list rather than stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ValidationError
from .model import (
    AirCoolerParams,
    FanParams,
    RoomAcParams,
    StateYearRecord,
)

SCHEMA_PRAGMA = "# cooldecomp-schema"
SCHEMA_VERSION = "v1"
PROVENANCE_PRAGMA = "# provenance"

LOCALES = ("urban", "rural")

KEY_COLUMNS = ("state", "year", "locale")
MANDATORY_VALUE_COLUMNS = ("population", "households", "nsdp_inr")
OPTIONAL_VALUE_COLUMNS = (
    "ac_floorspace_m2",
    "ac_load_kwh_m2",
    "iseer",
    "fans_per_100hh",
    "fan_hours",
    "fan_power_w",
    "coolers_per_100hh",
    "cooler_hours",
    "cooler_power_w",
)
EMISSION_COLUMN_KG = "emission_factor_kg_per_kwh"
EMISSION_COLUMN_T = "emission_factor_t_per_kwh"
NSDP_COLUMN = "nsdp_inr"
NSDP_COLUMN_LAKH = "nsdp_lakh_inr"

CANONICAL_COLUMNS = KEY_COLUMNS + OPTIONAL_VALUE_COLUMNS + (
    "population", "households", NSDP_COLUMN, EMISSION_COLUMN_KG)

# Zero-stock defaults for absent optional columns; a unit ISEER keeps the
# record computable when there is no AC stock to divide by it.
OPTIONAL_DEFAULTS = {name: 0.0 for name in OPTIONAL_VALUE_COLUMNS}
OPTIONAL_DEFAULTS["iseer"] = 1.0


@dataclass(frozen=True)
class PanelDataset:
    """Immutable panel of records keyed by (state, year, locale)."""

    records: Mapping[tuple[str, int, str], StateYearRecord]
    provenance: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "records", MappingProxyType(dict(self.records)))
        object.__setattr__(self, "provenance", MappingProxyType(dict(self.provenance)))

    @property
    def year_range(self) -> tuple[int, int] | None:
        if not self.records:
            return None
        years = [k[1] for k in self.records]
        return (min(years), max(years))

    def states(self) -> tuple[str, ...]:
        return tuple(sorted({k[0] for k in self.records}))

    def locales(self) -> tuple[str, ...]:
        return tuple(sorted({k[2] for k in self.records}))

    def series(self, state: str, locale: str) -> list[StateYearRecord]:
        rows = [r for (s, _, l), r in self.records.items() if s == state and l == locale]
        return sorted(rows, key=lambda r: r.year)

    def series_keys(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted({(k[0], k[2]) for k in self.records}))

    def __iter__(self) -> Iterator[StateYearRecord]:
        return iter(sorted(self.records.values(), key=lambda r: r.key()))

    def __len__(self) -> int:
        return len(self.records)


def _record_from_row(row: Mapping[str, float], state: str, year: int, locale: str) -> StateYearRecord:
    return StateYearRecord(
        state=state,
        year=year,
        locale=locale,
        room_ac=RoomAcParams(
            floorspace_served_m2=row["ac_floorspace_m2"],
            load_kwh_per_m2=row["ac_load_kwh_m2"],
            iseer=row["iseer"],
        ),
        fan=FanParams(
            units_per_household=row["fans_per_100hh"] / 100.0,
            annual_usage_hours=row["fan_hours"],
            rated_power_w=row["fan_power_w"],
        ),
        air_cooler=AirCoolerParams(
            units_per_household=row["coolers_per_100hh"] / 100.0,
            annual_usage_hours=row["cooler_hours"],
            rated_power_w=row["cooler_power_w"],
        ),
        population=row["population"],
        households=row["households"],
        nsdp_inr=row[NSDP_COLUMN],
        emission_factor=row[EMISSION_COLUMN_KG],
    )


def load(path: str | Path, schema_version: str = SCHEMA_VERSION) -> PanelDataset:
    """Parse and unit-normalize a panel file, rejecting it on any issue."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: not valid UTF-8 ({exc})") from exc
    lines = text.splitlines()
    issues: list[str] = []
    provenance: dict[str, str] = {}

    if not lines or not lines[0].startswith(SCHEMA_PRAGMA):
        raise ValidationError(
            f"{path}: first line must declare the schema, e.g. '{SCHEMA_PRAGMA} {SCHEMA_VERSION}'")
    declared = lines[0][len(SCHEMA_PRAGMA):].strip()
    if declared != schema_version:
        raise ValidationError(
            f"{path}: schema version {declared!r} is not the expected {schema_version!r}")

    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith(PROVENANCE_PRAGMA):
            note = line[len(PROVENANCE_PRAGMA):].strip()
            col, _, msg = note.partition(":")
            provenance[col.strip()] = msg.strip()
            continue
        if line.startswith("#") or not line.strip():
            continue
        body.append((lineno, line))

    if not body:
        raise ValidationError(f"{path}: no header row found")

    header_line_no, header_line = body[0]
    header = [h.strip() for h in header_line.split(",")]
    known = set(CANONICAL_COLUMNS) | {EMISSION_COLUMN_T, NSDP_COLUMN_LAKH}
    for col in header:
        if col not in known:
            issues.append(f"line {header_line_no}: unknown column {col!r}")
    if len(set(header)) != len(header):
        issues.append(f"line {header_line_no}: duplicated column names in header")
    if EMISSION_COLUMN_KG in header and EMISSION_COLUMN_T in header:
        issues.append(
            f"line {header_line_no}: both {EMISSION_COLUMN_KG!r} and {EMISSION_COLUMN_T!r} present")
    if NSDP_COLUMN in header and NSDP_COLUMN_LAKH in header:
        issues.append(
            f"line {header_line_no}: both {NSDP_COLUMN!r} and {NSDP_COLUMN_LAKH!r} present")
    has_emission = EMISSION_COLUMN_KG in header or EMISSION_COLUMN_T in header
    has_nsdp = NSDP_COLUMN in header or NSDP_COLUMN_LAKH in header
    for col in KEY_COLUMNS + MANDATORY_VALUE_COLUMNS:
        if col == NSDP_COLUMN:
            if not has_nsdp:
                issues.append(f"missing mandatory column {NSDP_COLUMN!r}")
            continue
        if col not in header:
            issues.append(f"missing mandatory column {col!r}")
    if not has_emission:
        issues.append(f"missing mandatory column {EMISSION_COLUMN_KG!r}")
    if issues:
        raise ValidationError(f"{path}: invalid schema", issues)

    records: dict[tuple[str, int, str], StateYearRecord] = {}
    for lineno, line in body[1:]:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(header):
            issues.append(f"line {lineno}: {len(cells)} cells for {len(header)} columns")
            continue
        raw = dict(zip(header, cells))
        row_ok = True
        values: dict[str, float] = dict(OPTIONAL_DEFAULTS)
        for col, cell in raw.items():
            if col in ("state", "locale"):
                continue
            try:
                value = float(cell) if col != "year" else int(cell)
            except ValueError:
                issues.append(f"line {lineno}: non-numeric cell {cell!r} in column {col!r}")
                row_ok = False
                continue
            if col == EMISSION_COLUMN_T:
                values[EMISSION_COLUMN_KG] = value * 1000.0
            elif col == NSDP_COLUMN_LAKH:
                values[NSDP_COLUMN] = value * 1e5
            else:
                values[col] = value
        state = raw.get("state", "")
        locale = raw.get("locale", "")
        if locale not in LOCALES:
            issues.append(f"line {lineno}: locale {locale!r} is not one of {LOCALES}")
            row_ok = False
        if not state:
            issues.append(f"line {lineno}: empty state")
            row_ok = False
        if not row_ok:
            continue
        year = int(values.pop("year"))
        key = (state, year, locale)
        if key in records:
            issues.append(f"line {lineno}: duplicate key {key!r}")
            continue
        records[key] = _record_from_row(values, state, year, locale)

    if issues:
        raise ValidationError(f"{path}: rejected with {len(issues)} issue(s)", issues)

    if EMISSION_COLUMN_T in header:
        provenance.setdefault(EMISSION_COLUMN_KG, "normalized from tCO2/kWh (x1000)")
    if NSDP_COLUMN_LAKH in header:
        provenance.setdefault(NSDP_COLUMN, "normalized from lakh INR (x1e5)")
    return PanelDataset(records=records, provenance=provenance)


_NUMERIC_FIELDS = (
    "ac_floorspace_m2", "ac_load_kwh_m2", "iseer",
    "fans_per_100hh", "fan_hours", "fan_power_w",
    "coolers_per_100hh", "cooler_hours", "cooler_power_w",
    "population", "households", NSDP_COLUMN, EMISSION_COLUMN_KG,
)


def _record_values(record: StateYearRecord) -> dict[str, float]:
    return {
        "ac_floorspace_m2": record.room_ac.floorspace_served_m2,
        "ac_load_kwh_m2": record.room_ac.load_kwh_per_m2,
        "iseer": record.room_ac.iseer,
        "fans_per_100hh": record.fan.units_per_household * 100.0,
        "fan_hours": record.fan.annual_usage_hours,
        "fan_power_w": record.fan.rated_power_w,
        "coolers_per_100hh": record.air_cooler.units_per_household * 100.0,
        "cooler_hours": record.air_cooler.annual_usage_hours,
        "cooler_power_w": record.air_cooler.rated_power_w,
        "population": record.population,
        "households": record.households,
        NSDP_COLUMN: record.nsdp_inr,
        EMISSION_COLUMN_KG: record.emission_factor,
    }


def serialize(dataset: PanelDataset, path: str | Path) -> None:
    """Write a dataset back out; load(serialize(d)) is value-identical."""
    path = Path(path)
    lines = [f"{SCHEMA_PRAGMA} {SCHEMA_VERSION}"]
    for col in sorted(dataset.provenance):
        lines.append(f"{PROVENANCE_PRAGMA} {col}: {dataset.provenance[col]}")
    lines.append(",".join(KEY_COLUMNS + _NUMERIC_FIELDS))
    for record in dataset:
        values = _record_values(record)
        cells = [record.state, str(record.year), record.locale]
        cells += [repr(values[col]) for col in _NUMERIC_FIELDS]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def interpolate(dataset: PanelDataset, target_years: Iterable[int]) -> PanelDataset:
    """Fill missing years per (state, locale) series by per-column linear
    interpolation between observed years.

    Observed records pass through untouched, so interpolating a gap-free
    dataset is the identity.  Target years outside a series' observed span
    are refused: the sources are survey knots and extrapolation would be
    invention.
    """
    targets = sorted(set(int(y) for y in target_years))
    if not targets:
        return dataset
    issues: list[str] = []
    new_records: dict[tuple[str, int, str], StateYearRecord] = dict(dataset.records)
    for state, locale in dataset.series_keys():
        series = dataset.series(state, locale)
        observed = [r.year for r in series]
        missing = [y for y in targets if y not in observed]
        if not missing:
            continue
        if len(observed) < 2:
            issues.append(
                f"series {state}/{locale}: needs >= 2 observed years to interpolate, has {observed}")
            continue
        outside = [y for y in missing if y < observed[0] or y > observed[-1]]
        if outside:
            issues.append(
                f"series {state}/{locale}: years {outside} are outside the observed span "
                f"{observed[0]}..{observed[-1]} (extrapolation refused)")
            continue
        knots = np.array(observed, dtype=float)
        columns = {name: np.array([_record_values(r)[name] for r in series])
                   for name in _NUMERIC_FIELDS}
        for y in missing:
            row = {name: float(np.interp(float(y), knots, col))
                   for name, col in columns.items()}
            new_records[(state, y, locale)] = _record_from_row(row, state, y, locale)
    if issues:
        raise ValidationError("interpolation failed", issues)
    provenance = dict(dataset.provenance)
    provenance.setdefault("_interpolation", "linear per column between observed years")
    return PanelDataset(records=new_records, provenance=provenance)


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    key: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[ValidationIssue, ...]

    @property
    def errors(self) -> tuple[ValidationIssue, ...]:
        return tuple(e for e in self.entries if e.severity == "error")

    @property
    def warnings(self) -> tuple[ValidationIssue, ...]:
        return tuple(e for e in self.entries if e.severity == "warning")

    @property
    def is_clean(self) -> bool:
        return not self.entries


def validate(dataset: PanelDataset) -> ValidationReport:
    """Report record-invariant breaches and series anomalies, without mutating."""
    entries: list[ValidationIssue] = []
    for record in dataset:
        key = f"{record.state}/{record.year}/{record.locale}"
        for violation in record.violations():
            entries.append(ValidationIssue("error", key, violation))
        if record.nsdp_inr <= 0:
            entries.append(ValidationIssue(
                "warning", key, f"nsdp_inr={record.nsdp_inr!r} is not positive; "
                "income-driver decomposition will be undefined"))
        energy_terms = (
            record.room_ac.floorspace_served_m2 * record.room_ac.load_kwh_per_m2,
            record.fan.units_per_household * record.fan.annual_usage_hours * record.fan.rated_power_w,
            record.air_cooler.units_per_household * record.air_cooler.annual_usage_hours
            * record.air_cooler.rated_power_w,
        )
        if all(t == 0 for t in energy_terms):
            entries.append(ValidationIssue(
                "warning", key, "no cooling energy at all; shares will be synthetic"))
    for state, locale in dataset.series_keys():
        years = [r.year for r in dataset.series(state, locale)]
        gaps = [y for y in range(years[0], years[-1] + 1) if y not in years]
        if gaps:
            entries.append(ValidationIssue(
                "warning", f"{state}/{locale}",
                f"missing years {gaps}; run interpolation to fill them"))
    return ValidationReport(tuple(entries))
