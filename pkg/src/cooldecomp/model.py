"""Bottom-up per-household space-cooling carbon intensity.

Three appliance classes are modelled: room air conditioners, fans, and
evaporative air coolers, all running on grid electricity.  Each appliance
contributes an annual energy term (kWh per household) which the grid
emission factor converts to carbon (kgCO2 per household).  Household
intensities roll up to state and national aggregates by household
weighting.

Room AC efficiency is an ISEER rating (seasonal load over seasonal energy),
so energy demand is load divided by ISEER.  Some published statements of
the per-appliance formula multiply by the rating instead; pass
``literal_iseer=True`` to reproduce that arithmetic exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum
from typing import Iterable, Sequence

from .errors import ValidationError

APPLIANCES = ("room_ac", "fan", "air_cooler")

# 366 days x 24 h: no annual usage figure can exceed a leap year.
MAX_ANNUAL_HOURS = 8784.0

ALL_LOCALES = "all"


def _bad(field: str, value: float, why: str) -> str:
    return f"{field}={value!r} {why}"


def _check_finite(issues: list[str], field: str, value: float) -> None:
    if not math.isfinite(value):
        issues.append(_bad(field, value, "is not finite"))


def _check_nonneg(issues: list[str], field: str, value: float) -> None:
    _check_finite(issues, field, value)
    if math.isfinite(value) and value < 0:
        issues.append(_bad(field, value, "must be >= 0"))


@dataclass(frozen=True)
class RoomAcParams:
    """Room AC inputs: served floorspace (m2), cooling load (kWh/m2/year), ISEER."""

    floorspace_served_m2: float
    load_kwh_per_m2: float
    iseer: float

    def violations(self) -> list[str]:
        issues: list[str] = []
        _check_nonneg(issues, "room_ac.floorspace_served_m2", self.floorspace_served_m2)
        _check_nonneg(issues, "room_ac.load_kwh_per_m2", self.load_kwh_per_m2)
        _check_finite(issues, "room_ac.iseer", self.iseer)
        if math.isfinite(self.iseer) and self.iseer <= 0:
            issues.append(_bad("room_ac.iseer", self.iseer, "must be > 0"))
        return issues


@dataclass(frozen=True)
class FanParams:
    """Fan inputs: units per household, annual usage hours, rated power (W)."""

    units_per_household: float
    annual_usage_hours: float
    rated_power_w: float

    _prefix = "fan"

    def violations(self) -> list[str]:
        issues: list[str] = []
        p = self._prefix
        _check_nonneg(issues, f"{p}.units_per_household", self.units_per_household)
        _check_nonneg(issues, f"{p}.annual_usage_hours", self.annual_usage_hours)
        _check_nonneg(issues, f"{p}.rated_power_w", self.rated_power_w)
        if math.isfinite(self.annual_usage_hours) and self.annual_usage_hours > MAX_ANNUAL_HOURS:
            issues.append(
                _bad(f"{p}.annual_usage_hours", self.annual_usage_hours,
                     f"exceeds {MAX_ANNUAL_HOURS:.0f} h/year")
            )
        return issues


@dataclass(frozen=True)
class AirCoolerParams(FanParams):
    """Air cooler inputs; same shape as fans (units, hours, rated W)."""

    _prefix = "air_cooler"


@dataclass(frozen=True)
class StateYearRecord:
    """One (state, year, locale) row of the input panel, in canonical units.

    Canonical units: emission factor in kgCO2/kWh, NSDP in INR, appliance
    stocks per household (not per 100 households).  Construction does not
    raise on invariant breaches; ``violations()`` reports them and the
    compute operations refuse invalid records.
    """

    state: str
    year: int
    locale: str
    room_ac: RoomAcParams
    fan: FanParams
    air_cooler: AirCoolerParams
    population: float
    households: float
    nsdp_inr: float
    emission_factor: float

    def key(self) -> tuple[str, int, str]:
        return (self.state, self.year, self.locale)

    def violations(self) -> list[str]:
        issues: list[str] = []
        issues += self.room_ac.violations()
        issues += self.fan.violations()
        issues += self.air_cooler.violations()
        _check_finite(issues, "population", self.population)
        _check_finite(issues, "households", self.households)
        _check_finite(issues, "nsdp_inr", self.nsdp_inr)
        _check_nonneg(issues, "emission_factor", self.emission_factor)
        if math.isfinite(self.households) and self.households <= 0:
            issues.append(_bad("households", self.households, "must be > 0"))
        if math.isfinite(self.population) and self.population <= 0:
            issues.append(_bad("population", self.population, "must be > 0"))
        if (
            math.isfinite(self.population)
            and math.isfinite(self.households)
            and self.population < self.households
        ):
            issues.append(
                _bad("population", self.population,
                     f"is below households={self.households!r} (need >= 1 person/household)")
            )
        return issues


@dataclass(frozen=True)
class IntensityBreakdown:
    """Per-household cooling carbon intensity split by appliance.

    Carbon in kgCO2/household, energy in kWh.  ``energy_shares`` follows the
    APPLIANCES order and sums to 1; when total energy is zero the shares are
    the uniform vector and ``shares_synthetic`` is set.  Derived ratios:
    ``persons_per_household`` (P/H), ``nsdp_per_capita`` (N/P), and
    ``energy_per_nsdp`` (E/N) feed the driver decomposition.
    """

    state: str
    year: int
    locale: str
    c_room_ac: float
    c_fan: float
    c_air_cooler: float
    c_total: float
    emissions_total: float
    energy_total: float
    energy_by_appliance: tuple[float, float, float]
    energy_shares: tuple[float, float, float]
    shares_synthetic: bool
    households: float
    population: float
    nsdp_inr: float
    emission_factor: float
    persons_per_household: float
    nsdp_per_capita: float
    energy_per_nsdp: float

    def carbon_by_appliance(self) -> tuple[float, float, float]:
        return (self.c_room_ac, self.c_fan, self.c_air_cooler)


@dataclass(frozen=True)
class GrowthStats:
    total_growth: float
    cagr: float


def _require_valid(issues: list[str]) -> None:
    if issues:
        raise ValidationError("invalid input", issues)


def room_ac_energy(params: RoomAcParams, *, literal_iseer: bool = False) -> float:
    """Annual room-AC energy, kWh/household.

    Default applies ISEER as a divisor (rating is load per unit energy); the
    literal mode multiplies by it instead.
    """
    _require_valid(params.violations())
    if literal_iseer:
        return params.floorspace_served_m2 * params.load_kwh_per_m2 * params.iseer
    return params.floorspace_served_m2 * params.load_kwh_per_m2 / params.iseer


def room_ac_intensity(params: RoomAcParams, emission_factor: float,
                      *, literal_iseer: bool = False) -> float:
    """Room-AC carbon, kgCO2/household."""
    issues: list[str] = []
    _check_nonneg(issues, "emission_factor", emission_factor)
    _require_valid(issues)
    return room_ac_energy(params, literal_iseer=literal_iseer) * emission_factor


def fan_energy(params: FanParams) -> float:
    """Annual fan energy, kWh/household (rated W converted to kW)."""
    _require_valid(params.violations())
    return params.units_per_household * params.annual_usage_hours * params.rated_power_w / 1000.0


def fan_intensity(params: FanParams, emission_factor: float) -> float:
    """Fan carbon, kgCO2/household."""
    issues: list[str] = []
    _check_nonneg(issues, "emission_factor", emission_factor)
    _require_valid(issues)
    return fan_energy(params) * emission_factor


def air_cooler_energy(params: AirCoolerParams) -> float:
    """Annual air-cooler energy, kWh/household."""
    return fan_energy(params)


def air_cooler_intensity(params: AirCoolerParams, emission_factor: float) -> float:
    """Air-cooler carbon, kgCO2/household."""
    return fan_intensity(params, emission_factor)


def _shares(energies: Sequence[float]) -> tuple[tuple[float, float, float], bool]:
    total = fsum(energies)
    if total <= 0.0:
        n = len(energies)
        return tuple(1.0 / n for _ in energies), True  # type: ignore[return-value]
    return tuple(e / total for e in energies), False  # type: ignore[return-value]


def household_intensity(record: StateYearRecord, *, literal_iseer: bool = False) -> IntensityBreakdown:
    """Full intensity breakdown for one panel record.

    Emissions total is intensity times households; energy total is emissions
    over the emission factor when the factor is positive, otherwise the
    pre-factor energy terms (all-zero emissions with nonzero energy is a
    legitimate zero-carbon-grid case).
    """
    _require_valid(record.violations())
    e_ac = room_ac_energy(record.room_ac, literal_iseer=literal_iseer)
    e_fan = fan_energy(record.fan)
    e_cool = air_cooler_energy(record.air_cooler)
    k = record.emission_factor
    c_ac, c_fan, c_cool = e_ac * k, e_fan * k, e_cool * k
    c_total = fsum((c_ac, c_fan, c_cool))
    emissions = c_total * record.households
    energy_terms = (e_ac, e_fan, e_cool)
    energy_hh = fsum(energy_terms)
    energy_total = emissions / k if k > 0 else energy_hh * record.households
    shares, synthetic = _shares(energy_terms)
    n_per_capita = record.nsdp_inr / record.population
    return IntensityBreakdown(
        state=record.state,
        year=record.year,
        locale=record.locale,
        c_room_ac=c_ac,
        c_fan=c_fan,
        c_air_cooler=c_cool,
        c_total=c_total,
        emissions_total=emissions,
        energy_total=energy_total,
        energy_by_appliance=(
            e_ac * record.households,
            e_fan * record.households,
            e_cool * record.households,
        ),
        energy_shares=shares,
        shares_synthetic=synthetic,
        households=record.households,
        population=record.population,
        nsdp_inr=record.nsdp_inr,
        emission_factor=k,
        persons_per_household=record.population / record.households,
        nsdp_per_capita=n_per_capita,
        energy_per_nsdp=(energy_total / record.nsdp_inr) if record.nsdp_inr != 0 else math.inf,
    )


def aggregate(breakdowns: Iterable[IntensityBreakdown], *,
              state: str = "IN-ALL", locale: str | None = None) -> IntensityBreakdown:
    """Household-weighted roll-up of breakdowns from one year.

    Emissions, energy, households, population, and NSDP sum; intensities are
    the resulting per-household means; shares are recomputed from summed
    energies.  Mixing years is an error.  The aggregate's locale is the
    common input locale unless they differ (then ``"all"``) or an explicit
    one is given.
    """
    items = list(breakdowns)
    if not items:
        raise ValidationError("cannot aggregate an empty list of breakdowns")
    years = {b.year for b in items}
    if len(years) > 1:
        raise ValidationError(
            f"cannot aggregate across years: {sorted(years)}")
    if locale is None:
        locales = {b.locale for b in items}
        locale = locales.pop() if len(locales) == 1 else ALL_LOCALES
    households = fsum(b.households for b in items)
    if households <= 0:
        raise ValidationError("aggregate has no households")
    population = fsum(b.population for b in items)
    nsdp = fsum(b.nsdp_inr for b in items)
    emissions = fsum(b.emissions_total for b in items)
    energy = fsum(b.energy_total for b in items)
    energy_by_app = tuple(
        fsum(b.energy_by_appliance[i] for b in items) for i in range(3)
    )
    carbon_by_app = tuple(
        fsum(b.carbon_by_appliance()[i] * b.households for b in items) / households
        for i in range(3)
    )
    shares, synthetic = _shares(energy_by_app)
    k = emissions / energy if energy > 0 else 0.0
    return IntensityBreakdown(
        state=state,
        year=years.pop(),
        locale=locale,
        c_room_ac=carbon_by_app[0],
        c_fan=carbon_by_app[1],
        c_air_cooler=carbon_by_app[2],
        c_total=emissions / households,
        emissions_total=emissions,
        energy_total=energy,
        energy_by_appliance=energy_by_app,  # type: ignore[arg-type]
        energy_shares=shares,
        shares_synthetic=synthetic,
        households=households,
        population=population,
        nsdp_inr=nsdp,
        emission_factor=k,
        persons_per_household=population / households,
        nsdp_per_capita=(nsdp / population) if population > 0 else 0.0,
        energy_per_nsdp=(energy / nsdp) if nsdp != 0 else math.inf,
    )


def growth_stats(c_start: float, c_end: float, years: int) -> GrowthStats:
    """Total growth fraction and compound annual growth rate over ``years``."""
    if not (math.isfinite(c_start) and math.isfinite(c_end)):
        raise ValidationError(f"growth inputs must be finite, got {c_start!r} -> {c_end!r}")
    if c_start <= 0:
        raise ValidationError(f"growth is undefined for non-positive start value {c_start!r}")
    if years < 1:
        raise ValidationError(f"growth period must cover at least one year, got {years!r}")
    ratio = c_end / c_start
    return GrowthStats(total_growth=ratio - 1.0, cagr=ratio ** (1.0 / years) - 1.0)
