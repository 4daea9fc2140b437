"""Panel ingestion: parsing, normalization, interpolation, validation."""

from __future__ import annotations

import pytest

from cooldecomp.errors import ValidationError
from cooldecomp.ingest import (
    interpolate,
    load,
    serialize,
    validate,
)

HEADER = ("state,year,locale,ac_floorspace_m2,ac_load_kwh_m2,iseer,"
          "fans_per_100hh,fan_hours,fan_power_w,coolers_per_100hh,cooler_hours,"
          "cooler_power_w,population,households,nsdp_inr,emission_factor_kg_per_kwh")

ROW = "Goa,2020,urban,5.0,120.0,3.5,240,3000,70,40,1200,180,600000,140000,9.1e10,0.79"


def write_panel(tmp_path, body: str, pragma: str = "# cooldecomp-schema v1"):
    path = tmp_path / "panel.csv"
    path.write_text(pragma + "\n" + body, encoding="utf-8")
    return path


class TestLoad:
    def test_header_only_is_empty_dataset(self, tmp_path):
        ds = load(write_panel(tmp_path, HEADER + "\n"))
        assert len(ds) == 0
        assert ds.year_range is None

    def test_basic_row_normalization(self, tmp_path):
        ds = load(write_panel(tmp_path, HEADER + "\n" + ROW + "\n"))
        record = ds.records[("Goa", 2020, "urban")]
        assert record.fan.units_per_household == pytest.approx(2.4)
        assert record.air_cooler.units_per_household == pytest.approx(0.4)
        assert record.emission_factor == pytest.approx(0.79)

    def test_per_100_households_normalization(self, tmp_path):
        row = ROW.replace(",240,", ",180,")
        ds = load(write_panel(tmp_path, HEADER + "\n" + row + "\n"))
        record = ds.records[("Goa", 2020, "urban")]
        assert record.fan.units_per_household == pytest.approx(1.8)

    def test_tonne_emission_column_scales(self, tmp_path):
        header = HEADER.replace("emission_factor_kg_per_kwh", "emission_factor_t_per_kwh")
        row = ROW.replace(",0.79", ",0.00082")
        ds = load(write_panel(tmp_path, header + "\n" + row + "\n"))
        record = ds.records[("Goa", 2020, "urban")]
        assert record.emission_factor == pytest.approx(0.82)
        assert "emission_factor_kg_per_kwh" in ds.provenance

    def test_lakh_nsdp_column_scales(self, tmp_path):
        header = HEADER.replace("nsdp_inr", "nsdp_lakh_inr")
        row = ROW.replace(",9.1e10,", ",910000.0,")
        ds = load(write_panel(tmp_path, header + "\n" + row + "\n"))
        assert ds.records[("Goa", 2020, "urban")].nsdp_inr == pytest.approx(9.1e10)

    def test_missing_optional_columns_default_to_zero_stock(self, tmp_path):
        header = "state,year,locale,fans_per_100hh,fan_hours,fan_power_w,population,households,nsdp_inr,emission_factor_kg_per_kwh"
        row = "Goa,2020,rural,120,2800,72,500000,110000,5e10,0.79"
        ds = load(write_panel(tmp_path, header + "\n" + row + "\n"))
        record = ds.records[("Goa", 2020, "rural")]
        assert record.room_ac.floorspace_served_m2 == 0.0
        assert record.room_ac.iseer == 1.0
        assert record.air_cooler.units_per_household == 0.0

    def test_missing_pragma_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="schema"):
            load(write_panel(tmp_path, HEADER + "\n", pragma="state,year"))

    def test_wrong_schema_version_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="v9"):
            load(write_panel(tmp_path, HEADER + "\n", pragma="# cooldecomp-schema v9"))

    def test_unknown_column_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown column 'wind_turbines'"):
            load(write_panel(tmp_path, HEADER + ",wind_turbines\n" + ROW + ",3\n"))

    def test_missing_mandatory_column_rejected(self, tmp_path):
        header = HEADER.replace(",households", "")
        row = ROW.replace(",140000", "")
        with pytest.raises(ValidationError, match="missing mandatory column 'households'"):
            load(write_panel(tmp_path, header + "\n" + row + "\n"))

    def test_every_issue_is_listed(self, tmp_path):
        bad1 = ROW.replace("600000", "not-a-number")
        bad2 = ROW.replace("2020", "203x")
        dup = ROW
        body = HEADER + "\n" + ROW + "\n" + bad1 + "\n" + bad2 + "\n" + dup + "\n"
        with pytest.raises(ValidationError) as exc:
            load(write_panel(tmp_path, body))
        issues = exc.value.issues
        assert len(issues) == 3
        assert any("not-a-number" in i for i in issues)
        assert any("203x" in i for i in issues)
        assert any("duplicate key" in i for i in issues)

    def test_bad_locale_rejected(self, tmp_path):
        row = ROW.replace("urban", "suburban")
        with pytest.raises(ValidationError, match="suburban"):
            load(write_panel(tmp_path, HEADER + "\n" + row + "\n"))

    def test_round_trip_is_value_identical(self, tmp_path):
        rows = [
            ROW,
            "Goa,2021,urban,5.25,121.5,3.6,242,3010,69.5,41,1210,179,601234,141000,9.3e10,0.775",
            "Kerala,2020,rural,0.1,130.0,3.2,150,2700,74,20,900,170,2.5e6,5.5e5,4.2e10,0.79",
        ]
        ds = load(write_panel(tmp_path, HEADER + "\n" + "\n".join(rows) + "\n"))
        out = tmp_path / "roundtrip.csv"
        serialize(ds, out)
        again = load(out)
        assert set(again.records) == set(ds.records)
        for key, record in ds.records.items():
            assert again.records[key] == record


class TestInterpolate:
    def panel(self, tmp_path, years_values):
        rows = []
        for year, value in years_values:
            rows.append(
                f"Goa,{year},urban,{value},120.0,3.5,240,3000,70,40,1200,180,600000,140000,9.1e10,0.79")
        return load(write_panel(tmp_path, HEADER + "\n" + "\n".join(rows) + "\n"))

    def test_midpoint(self, tmp_path):
        ds = self.panel(tmp_path, [(2000, 1.0), (2010, 2.0)])
        filled = interpolate(ds, range(2000, 2011))
        assert filled.records[("Goa", 2005, "urban")].room_ac.floorspace_served_m2 == pytest.approx(1.5)

    def test_knot_values_bit_exact(self, tmp_path):
        ds = self.panel(tmp_path, [(2000, 1.1), (2010, 2.7)])
        filled = interpolate(ds, range(2000, 2011))
        assert filled.records[("Goa", 2000, "urban")] is ds.records[("Goa", 2000, "urban")]
        assert filled.records[("Goa", 2010, "urban")].room_ac.floorspace_served_m2 == 2.7

    def test_published_knots_linear_value(self, tmp_path):
        # Knots 2011: 290.0 and 2022: 358.1; 2016 interpolates to 320.95.
        ds = self.panel(tmp_path, [(2011, 290.0), (2022, 358.1)])
        filled = interpolate(ds, range(2011, 2023))
        got = filled.records[("Goa", 2016, "urban")].room_ac.floorspace_served_m2
        assert got == pytest.approx(290.0 + (358.1 - 290.0) * 5 / 11, abs=1e-9)

    def test_idempotent_on_gap_free(self, tmp_path):
        ds = self.panel(tmp_path, [(2000, 1.0), (2001, 1.5), (2002, 2.5)])
        filled = interpolate(ds, range(2000, 2003))
        assert filled.records == ds.records

    def test_extrapolation_refused(self, tmp_path):
        ds = self.panel(tmp_path, [(2005, 1.0), (2010, 2.0)])
        with pytest.raises(ValidationError, match="Goa/urban.*2000.*extrapolation"):
            interpolate(ds, range(2000, 2011))

    def test_single_observation_refused(self, tmp_path):
        ds = self.panel(tmp_path, [(2005, 1.0)])
        with pytest.raises(ValidationError, match=">= 2 observed"):
            interpolate(ds, range(2004, 2007))


class TestValidate:
    def test_clean_panel_empty_report(self, tmp_path):
        ds = load(write_panel(tmp_path, HEADER + "\n" + ROW + "\n"))
        report = validate(ds)
        assert report.is_clean

    def test_population_below_households(self, tmp_path):
        row = ROW.replace("600000,140000", "100000,140000")
        ds = load(write_panel(tmp_path, HEADER + "\n" + row + "\n"))
        report = validate(ds)
        assert len(report.errors) == 1
        assert "Goa/2020/urban" in report.errors[0].key
        assert "below households" in report.errors[0].message

    def test_excessive_hours(self, tmp_path):
        row = ROW.replace(",3000,", ",9000,")
        ds = load(write_panel(tmp_path, HEADER + "\n" + row + "\n"))
        report = validate(ds)
        assert any("annual_usage_hours" in e.message and "8784" in e.message
                   for e in report.errors)

    def test_year_gap_is_warning(self, tmp_path):
        rows = [ROW, ROW.replace("2020", "2023")]
        ds = load(write_panel(tmp_path, HEADER + "\n" + "\n".join(rows) + "\n"))
        report = validate(ds)
        assert not report.errors
        assert any("missing years" in w.message for w in report.warnings)

    def test_dataset_not_mutated(self, tmp_path):
        row = ROW.replace(",3000,", ",9000,")
        ds = load(write_panel(tmp_path, HEADER + "\n" + row + "\n"))
        before = dict(ds.records)
        validate(ds)
        assert dict(ds.records) == before
