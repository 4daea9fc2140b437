"""Decarbonization measures built on contribution ledgers.

Decarbonization intensity is the negated sum of the strictly negative
grouped driver contributions in a ledger; multiplying by households gives
the total, and dividing the total by emissions (or NSDP) gives the
efficiency (or per-NSDP) measures.  Cumulative series chain year-over-year
ledgers and maintain running sums, so cumulative efficiency at year t is
cumulative decarbonization over cumulative emissions since the series
start.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .decomposition import ContributionLedger, signed_group_sums
from .errors import ValidationError

KG_PER_MEGATON = 1e9
INR_PER_LAKH = 1e5


@dataclass(frozen=True)
class DecarbMetrics:
    """Decarbonization measures for one period (kg-based units).

    ``decarb_intensity`` in kgCO2/household, ``total_decarb`` in kgCO2
    (divide by 1e9 for MtCO2), ``per_nsdp`` in kgCO2 per lakh rupee,
    ``efficiency`` a fraction.
    """

    period: tuple[int, int]
    decarb_intensity: float
    total_decarb: float
    per_nsdp: float
    efficiency: float


def decarb_intensity(ledger: ContributionLedger, *, per_driver: bool = False) -> float:
    """Negated sum of the negative contributions (grouped level by default).

    Positive contributions are ignored; a ledger with no negative
    contributions decarbonizes nothing.
    """
    source = ledger.per_driver if per_driver else ledger.grouped
    _, neg = signed_group_sums(source)
    return -neg


def total_decarb(dc: float, households: float) -> float:
    """Decarbonization intensity scaled by household count, in kgCO2."""
    if dc < 0:
        raise ValidationError(f"decarbonization intensity must be >= 0, got {dc!r}")
    if households <= 0:
        raise ValidationError(f"households must be > 0, got {households!r}")
    return dc * households


def decarb_efficiency(total: float, emissions: float) -> float:
    """Total decarbonization over the corresponding emissions."""
    if emissions <= 0:
        raise ValidationError(f"emissions must be > 0, got {emissions!r}")
    return total / emissions


def decarb_per_nsdp(total: float, nsdp: float) -> float:
    """Total decarbonization per lakh (1e5) rupees of NSDP."""
    if nsdp <= 0:
        raise ValidationError(f"nsdp must be > 0, got {nsdp!r}")
    return total / (nsdp / INR_PER_LAKH)


@dataclass(frozen=True)
class YearlyEntry:
    """One chained year: the ledger decomposing year-1 -> year plus that
    year's households, emissions (kgCO2), and NSDP (INR)."""

    year: int
    ledger: ContributionLedger
    households: float
    emissions: float
    nsdp: float


def cumulative_series(entries: Sequence[YearlyEntry] | Iterable[YearlyEntry],
                      *, per_driver: bool = False) -> list[DecarbMetrics]:
    """Cumulative decarbonization metrics over consecutive chained years.

    Decarbonization and emissions accumulate from the series start, so the
    efficiency at year t is cumulative decarbonization over cumulative
    emissions.  The per-NSDP measure divides cumulative decarbonization by
    the current year's NSDP: product grows with the economy, so a summed
    denominator would dilute the measure into meaninglessness.
    """
    items = list(entries)
    if not items:
        raise ValidationError("cumulative series needs at least one yearly entry")
    for prev, cur in zip(items, items[1:]):
        if cur.year != prev.year + 1:
            raise ValidationError(
                f"year gap in series: {prev.year} is followed by {cur.year}")
    start_year = items[0].year - 1
    out: list[DecarbMetrics] = []
    cum_total = 0.0
    cum_emissions = 0.0
    cum_dc = 0.0
    for entry in items:
        dc = decarb_intensity(entry.ledger, per_driver=per_driver)
        cum_dc += dc
        cum_total += total_decarb(dc, entry.households) if dc > 0 else 0.0
        if entry.emissions <= 0:
            raise ValidationError(
                f"year {entry.year}: emissions must be > 0, got {entry.emissions!r}")
        cum_emissions += entry.emissions
        out.append(DecarbMetrics(
            period=(start_year, entry.year),
            decarb_intensity=cum_dc,
            total_decarb=cum_total,
            per_nsdp=decarb_per_nsdp(cum_total, entry.nsdp),
            efficiency=decarb_efficiency(cum_total, cum_emissions),
        ))
    return out
