"""Decarbonization metrics over contribution ledgers."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cooldecomp.decomposition import (
    ContributionLedger,
    decompose,
    signed_group_sums,
)
from cooldecomp.errors import ValidationError
from cooldecomp.metrics import (
    KG_PER_MEGATON,
    YearlyEntry,
    cumulative_series,
    decarb_efficiency,
    decarb_intensity,
    decarb_per_nsdp,
    total_decarb,
)

from test_decomposition import random_problem


def ledger_with(grouped: dict[str, float], residual: float = 0.0) -> ContributionLedger:
    pos, neg = signed_group_sums(grouped)
    total = pos + neg + residual
    return ContributionLedger(
        per_driver=dict(grouped), grouped=dict(grouped),
        total_change=total, residual=residual, residual_bound=max(1.0, abs(residual) * 2),
        segments=1, start_value=0.0, end_value=total)


class TestDecarbIntensity:
    def test_hand_example(self):
        ledger = ledger_with({"n": 400.0, "k": -80.0, "p": -20.0, "e": 5.0})
        assert decarb_intensity(ledger) == pytest.approx(100.0)

    def test_all_positive_gives_zero(self):
        ledger = ledger_with({"n": 10.0, "k": 3.0})
        assert decarb_intensity(ledger) == 0.0

    def test_per_driver_granularity(self):
        ledger = ContributionLedger(
            per_driver={"k[a]": -5.0, "k[b]": 8.0, "p": -1.0},
            grouped={"k": 3.0, "p": -1.0},
            total_change=2.0, residual=0.0, residual_bound=1.0,
            segments=1, start_value=0.0, end_value=2.0)
        assert decarb_intensity(ledger) == pytest.approx(1.0)
        assert decarb_intensity(ledger, per_driver=True) == pytest.approx(6.0)

    def test_real_ledger_is_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            ledger = decompose(random_problem(rng, segments=256))
            assert decarb_intensity(ledger) >= 0.0


class TestTotalDecarb:
    def test_zero(self):
        assert total_decarb(0.0, 1000.0) == 0.0

    def test_hand_example(self):
        # 100 kg/household over 2e8 households is 20 Mt.
        assert total_decarb(100.0, 2e8) / KG_PER_MEGATON == pytest.approx(20.0)

    def test_rejects_negative_intensity(self):
        with pytest.raises(ValidationError, match=">= 0"):
            total_decarb(-1.0, 100.0)

    def test_rejects_nonpositive_households(self):
        with pytest.raises(ValidationError, match="households"):
            total_decarb(1.0, 0.0)


class TestEfficiencyAndPerNsdp:
    def test_zero_decarb(self):
        assert decarb_efficiency(0.0, 100.0) == 0.0
        assert decarb_per_nsdp(0.0, 100.0) == 0.0

    def test_total_equals_emissions(self):
        assert decarb_efficiency(123.0, 123.0) == 1.0

    def test_rejects_nonpositive_denominators(self):
        with pytest.raises(ValidationError):
            decarb_efficiency(1.0, 0.0)
        with pytest.raises(ValidationError):
            decarb_per_nsdp(1.0, -5.0)

    def test_per_lakh_scaling(self):
        # 1000 kg against 2 lakh rupees is 500 kg per lakh.
        assert decarb_per_nsdp(1000.0, 2e5) == pytest.approx(500.0)

    def test_unit_rescaling_invariance(self):
        total, emissions = 206.2e9, 2426.0e9
        eff_kg = decarb_efficiency(total, emissions)
        eff_mt = decarb_efficiency(total / KG_PER_MEGATON, emissions / KG_PER_MEGATON)
        assert eff_mt == pytest.approx(eff_kg, rel=1e-12)


class TestCumulativeSeries:
    def entry(self, year, neg, households=1.0, emissions=100.0, nsdp=1e5):
        ledger = ledger_with({"n": 50.0, "k": -neg})
        return YearlyEntry(year, ledger, households, emissions, nsdp)

    def test_single_year_matches_one_shot(self):
        series = cumulative_series([self.entry(2001, 10.0)])
        assert len(series) == 1
        m = series[0]
        assert m.period == (2000, 2001)
        assert m.decarb_intensity == pytest.approx(10.0)
        assert m.total_decarb == pytest.approx(10.0)
        assert m.efficiency == pytest.approx(0.1)

    def test_running_sums(self):
        series = cumulative_series([self.entry(2001, 10.0), self.entry(2002, 30.0)])
        assert [m.efficiency for m in series] == pytest.approx([0.10, 0.20])
        assert series[1].decarb_intensity == pytest.approx(40.0)
        assert series[1].period == (2000, 2002)

    def test_gap_rejected(self):
        with pytest.raises(ValidationError, match="gap"):
            cumulative_series([self.entry(2001, 1.0), self.entry(2003, 1.0)])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError, match="at least one"):
            cumulative_series([])

    def test_cumulative_total_nondecreasing(self):
        rng = np.random.default_rng(4)
        entries = []
        for i in range(15):
            ledger = decompose(random_problem(rng, segments=128))
            entries.append(YearlyEntry(2001 + i, ledger, households=100.0 + i,
                                       emissions=50.0 + i, nsdp=1e6))
        series = cumulative_series(entries)
        totals = [m.total_decarb for m in series]
        assert all(b >= a for a, b in zip(totals, totals[1:]))

    def test_per_nsdp_uses_current_year_nsdp(self):
        series = cumulative_series([
            self.entry(2001, 10.0, nsdp=1e5),
            self.entry(2002, 10.0, nsdp=4e5),
        ])
        assert series[0].per_nsdp == pytest.approx(10.0)
        assert series[1].per_nsdp == pytest.approx(20.0 / 4.0)


class TestDecompositionIdentity:
    @given(seed=st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_total_equals_positive_sum_minus_decarb_plus_residual(self, seed):
        ledger = decompose(random_problem(np.random.default_rng(seed), segments=64))
        pos, _ = signed_group_sums(ledger.grouped)
        dc = decarb_intensity(ledger)
        assert (pos - dc) + ledger.residual == ledger.total_change

    def test_exactness_holds_bitwise_on_handmade_ledgers(self):
        for grouped in ({"a": 0.1, "b": -0.3, "c": 0.7},
                        {"a": 1e8, "b": -1e-8},
                        {"a": -5.0, "b": -7.0}):
            ledger = ledger_with(grouped, residual=0.0)
            pos, _ = signed_group_sums(ledger.grouped)
            dc = decarb_intensity(ledger)
            assert (pos - dc) + ledger.residual == ledger.total_change
