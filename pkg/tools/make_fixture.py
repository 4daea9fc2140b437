"""Generate the calibrated synthetic demonstration panel.

The panel is synthetic: 33 states x urban/rural x 2000-2022, built from
national urban/rural trajectories and distributed across states with fixed
multipliers, so state aggregation reproduces the national series exactly.
The national trajectories are calibrated so the shipped pipeline reproduces
the headline demonstration figures (intensity levels, driver contribution
rates, cumulative decarbonization and efficiency) within their stated
tolerances.  Nothing here is survey data.

Run from the repository root:  python tools/make_fixture.py [--verify-only]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cooldecomp.decomposition import build_problem_from_breakdowns, decompose
from cooldecomp.metrics import decarb_intensity
from cooldecomp.model import IntensityBreakdown

YEARS = np.arange(2000, 2023)
T = YEARS - 2000
N_YEARS = len(YEARS)

# ---------------------------------------------------------------------------
# Headline calibration targets (demonstration figures the pipeline must hit).
# ---------------------------------------------------------------------------
C_NAT_2022 = 513.8
GROWTH_TOTAL = 2.924                       # +292.4% over 2000-2022
C_NAT_2000 = C_NAT_2022 / (1.0 + GROWTH_TOTAL)

# Urban / rural carbon intensity anchors (kg/household) at 2000, 2011, 2022,
# per appliance, reconciled so components sum to the period totals.
ANCHOR_YEARS = (2000, 2011, 2022)
URBAN_ANCHORS = {
    "room_ac": (80.0, 110.0, 153.2),
    "fan": (136.3, 573.9, 524.5),
    "air_cooler": (68.8, 49.2, 67.0),
}
RURAL_ANCHORS = {
    "room_ac": (0.0, 9.8, 20.2),
    "fan": (61.2, 263.2, 294.6),
    "air_cooler": (7.3, 17.0, 43.3),
}
C_U = (285.1, 733.1, 744.7)
C_R = (68.5, 290.0, 358.1)

FAN_ENERGY_NAT_2022 = 493.9                # kWh/household, national average

# Household-share endpoints implied by the intensity anchors.
URBAN_SHARE_2000 = (C_NAT_2000 - C_R[0]) / (C_U[0] - C_R[0])
URBAN_SHARE_2022 = (C_NAT_2022 - C_R[2]) / (C_U[2] - C_R[2])

# 2022 emission factor implied by the national fan-energy calibration.
FAN_C_NAT_2022 = URBAN_SHARE_2022 * URBAN_ANCHORS["fan"][2] + \
    (1.0 - URBAN_SHARE_2022) * RURAL_ANCHORS["fan"][2]
K_2022 = FAN_C_NAT_2022 / FAN_ENERGY_NAT_2022

TARGETS = {
    "rate_n_nat": 1.965,
    "rate_k_nat": -0.415,
    "rate_p_urban": -0.405,
    "cum_dc_urban": 1386.1,
    "yearly_ratio_2012": 0.112,
    "eff_2022": 0.085,
    "share_2012_on": 0.722,
    "per_nsdp_urban": 379.7,
    "per_nsdp_rural": 218.4,
    "total_mt": 206.2,
}

COVID_DIP = 0.055            # 2021 income contraction (log units)
P_U0, P_R0, P_RT = 5.35, 5.80, 4.90
H_GROWTH = 0.021             # national household growth per year
SHARE_WARP = 0.95            # urbanization path exponent
WARP_EARLY, WARP_LATE = 1.15, 1.0
CAL_SEGMENTS = 2000          # engine resolution during calibration
VERIFY_SEGMENTS = 16000


def warp_interp(anchors: tuple[float, float, float], dips: np.ndarray) -> np.ndarray:
    """Monotone interpolation through the three anchors with a shape warp,
    times (1 + dip) with dips zero at anchor years."""
    out = np.empty(N_YEARS)
    a0, a1, a2 = anchors
    for i, year in enumerate(YEARS):
        if year <= 2011:
            tau = (year - 2000) / 11.0
            out[i] = a0 + (a1 - a0) * tau ** WARP_EARLY
        else:
            tau = (year - 2011) / 11.0
            out[i] = a1 + (a2 - a1) * tau ** WARP_LATE
    return out * (1.0 + dips)


def log_knot_path(knot_years: list[int], knot_logs: list[float]) -> np.ndarray:
    return np.exp(np.interp(YEARS.astype(float),
                            np.array(knot_years, float), np.array(knot_logs)))


@dataclass
class Params:
    k0: float
    k03: float
    k11: float
    k12: float
    ln_nu_2005: float     # urban income log level at 2005 (rel. 2000)
    ln_nu_2011: float
    ln_nu_2020: float
    ln_nu_2022: float
    ln_nr_2005: float
    ln_nr_2011: float
    ln_nr_2020: float
    ln_nr_2022: float
    p_uT: float
    dip12_u: float        # 2012 cooling-demand dip, urban
    dip12_r: float

    @classmethod
    def from_vector(cls, x):
        return cls(*x)

    def vector(self):
        return np.array([self.k0, self.k03, self.k11, self.k12,
                         self.ln_nu_2005, self.ln_nu_2011, self.ln_nu_2020, self.ln_nu_2022,
                         self.ln_nr_2005, self.ln_nr_2011, self.ln_nr_2020, self.ln_nr_2022,
                         self.p_uT, self.dip12_u, self.dip12_r])


@dataclass
class Panel:
    """National urban/rural yearly arrays, all in canonical units."""
    carbon: dict            # locale -> appliance -> array (kg/household)
    k: np.ndarray           # kg/kWh, shared
    p: dict                 # locale -> persons per household
    n: dict                 # locale -> NSDP per capita (INR)
    households: dict        # locale -> count
    h_scale: float = 1.0


def build_panel(par: Params, n_u0: float, n_r0: float, h22: float) -> Panel:
    dips_u = np.zeros(N_YEARS)
    dips_r = np.zeros(N_YEARS)
    dips_u[YEARS == 2012] = -par.dip12_u
    dips_r[YEARS == 2012] = -par.dip12_r
    dips_u[YEARS == 2021] = -0.35 * par.dip12_u   # mild pandemic-year dent
    dips_r[YEARS == 2021] = -0.35 * par.dip12_r
    carbon = {
        "urban": {a: warp_interp(URBAN_ANCHORS[a], dips_u) for a in URBAN_ANCHORS},
        "rural": {a: warp_interp(RURAL_ANCHORS[a], dips_r) for a in RURAL_ANCHORS},
    }
    k = log_knot_path([2000, 2003, 2011, 2012, 2022],
                      [np.log(par.k0), np.log(par.k03), np.log(par.k11),
                       np.log(par.k12), np.log(K_2022)])
    p = {
        "urban": P_U0 + (par.p_uT - P_U0) * T / 22.0,
        "rural": P_R0 + (P_RT - P_R0) * T / 22.0,
    }
    n = {
        "urban": n_u0 * log_knot_path(
            [2000, 2005, 2011, 2020, 2021, 2022],
            [0.0, par.ln_nu_2005, par.ln_nu_2011, par.ln_nu_2020,
             par.ln_nu_2020 - COVID_DIP, par.ln_nu_2022]),
        "rural": n_r0 * log_knot_path(
            [2000, 2005, 2011, 2020, 2021, 2022],
            [0.0, par.ln_nr_2005, par.ln_nr_2011, par.ln_nr_2020,
             par.ln_nr_2020 - COVID_DIP, par.ln_nr_2022]),
    }
    h_nat = h22 * (1.0 + H_GROWTH) ** (T - 22.0)
    share = URBAN_SHARE_2000 + (URBAN_SHARE_2022 - URBAN_SHARE_2000) * (T / 22.0) ** SHARE_WARP
    households = {"urban": share * h_nat, "rural": (1.0 - share) * h_nat}
    return Panel(carbon=carbon, k=k, p=p, n=n, households=households)


APPLIANCES = ("room_ac", "fan", "air_cooler")


def breakdown_at(panel: Panel, locale: str, i: int) -> IntensityBreakdown:
    """Directly assemble the intensity breakdown for one national series year."""
    if locale == "all":
        parts = [breakdown_at(panel, l, i) for l in ("urban", "rural")]
        hh = sum(b.households for b in parts)
        emissions = sum(b.emissions_total for b in parts)
        energy = sum(b.energy_total for b in parts)
        energy_i = tuple(sum(b.energy_by_appliance[j] for b in parts) for j in range(3))
        population = sum(b.population for b in parts)
        nsdp = sum(b.nsdp_inr for b in parts)
        carbon_i = tuple(sum(b.carbon_by_appliance()[j] * b.households for b in parts) / hh
                         for j in range(3))
        k = emissions / energy
        return IntensityBreakdown(
            state="IN", year=int(YEARS[i]), locale="all",
            c_room_ac=carbon_i[0], c_fan=carbon_i[1], c_air_cooler=carbon_i[2],
            c_total=emissions / hh, emissions_total=emissions, energy_total=energy,
            energy_by_appliance=energy_i, energy_shares=tuple(e / energy for e in energy_i),
            shares_synthetic=False, households=hh, population=population,
            nsdp_inr=nsdp, emission_factor=k,
            persons_per_household=population / hh, nsdp_per_capita=nsdp / population,
            energy_per_nsdp=energy / nsdp)
    carbon_i = tuple(panel.carbon[locale][a][i] for a in APPLIANCES)
    k = panel.k[i]
    hh = panel.households[locale][i]
    c_total = sum(carbon_i)
    emissions = c_total * hh
    energy = emissions / k
    energy_i = tuple(c * hh / k for c in carbon_i)
    population = panel.p[locale][i] * hh
    nsdp = panel.n[locale][i] * population
    return IntensityBreakdown(
        state="IN", year=int(YEARS[i]), locale=locale,
        c_room_ac=carbon_i[0], c_fan=carbon_i[1], c_air_cooler=carbon_i[2],
        c_total=c_total, emissions_total=emissions, energy_total=energy,
        energy_by_appliance=energy_i,
        energy_shares=tuple(e / energy for e in energy_i),
        shares_synthetic=False, households=hh, population=population,
        nsdp_inr=nsdp, emission_factor=k,
        persons_per_household=panel.p[locale][i],
        nsdp_per_capita=panel.n[locale][i],
        energy_per_nsdp=energy / nsdp)


def one_shot_rates(panel: Panel, locale: str, segments: int) -> dict[str, float]:
    start = breakdown_at(panel, locale, 0)
    end = breakdown_at(panel, locale, N_YEARS - 1)
    ledger = decompose(build_problem_from_breakdowns(start, end, segments=segments))
    total = ledger.total_change
    return {name: value / total for name, value in ledger.grouped.items()}


def yearly_decarb(panel: Panel, locale: str, segments: int):
    """Per-year decarb intensity, the year's c and households, for 2001..2022."""
    breakdowns = [breakdown_at(panel, locale, i) for i in range(N_YEARS)]
    dc = np.empty(N_YEARS - 1)
    for i in range(1, N_YEARS):
        ledger = decompose(build_problem_from_breakdowns(
            breakdowns[i - 1], breakdowns[i], segments=segments))
        dc[i - 1] = decarb_intensity(ledger)
    c = np.array([b.c_total for b in breakdowns[1:]])
    hh = np.array([b.households for b in breakdowns[1:]])
    nsdp = np.array([b.nsdp_inr for b in breakdowns[1:]])
    return dc, c, hh, nsdp


def evaluate(par: Params, scales: tuple[float, float, float] = (1.0, 1.0, 1.0),
             segments: int = CAL_SEGMENTS) -> dict[str, float]:
    n_u0, n_r0, h22 = scales
    panel = build_panel(par, n_u0=n_u0, n_r0=n_r0, h22=h22)
    out: dict[str, float] = {}
    nat = one_shot_rates(panel, "all", segments)
    out["rate_n_nat"] = nat["n"]
    out["rate_k_nat"] = nat["k"]
    out["rate_p_urban"] = one_shot_rates(panel, "urban", segments)["p"]

    dc_u, c_u, hh_u, nsdp_u = yearly_decarb(panel, "urban", segments)
    dc_r, c_r, hh_r, nsdp_r = yearly_decarb(panel, "rural", segments)
    dc_n, c_n, hh_n, _ = yearly_decarb(panel, "all", segments)
    out["cum_dc_urban"] = dc_u.sum()
    out["cum_dc_rural"] = dc_r.sum()
    ratios = dc_n / c_n
    out["yearly_ratio_2012"] = ratios[YEARS[1:] == 2012][0]
    out["eff_2022"] = float((dc_n * hh_n).sum() / (c_n * hh_n).sum())
    out["share_2012_on"] = float(dc_n[YEARS[1:] >= 2012].sum() / dc_n.sum())
    out["late_ratios"] = ratios[YEARS[1:] >= 2013]
    out["band_lo"] = float(ratios[YEARS[1:] >= 2013].min())
    out["band_hi"] = float(ratios[YEARS[1:] >= 2013].max())
    out["peak_year"] = int(YEARS[1:][np.argmax(ratios)])
    out["pre2012_max"] = float(ratios[YEARS[1:] < 2012].max())
    # Scale-dependent quantities (per-NSDP divides by the final year's NSDP).
    out["raw_per_nsdp_u"] = float((dc_u * hh_u).sum() / nsdp_u[-1] * 1e5)
    out["raw_per_nsdp_r"] = float((dc_r * hh_r).sum() / nsdp_r[-1] * 1e5)
    out["raw_total"] = float((dc_n * hh_n).sum())
    return out


def residuals(x: np.ndarray, scales=(1.0, 1.0, 1.0)) -> np.ndarray:
    par = Params.from_vector(x)
    try:
        m = evaluate(par, scales)
    except Exception:
        return np.full(10, 10.0)
    res = [
        (m["rate_n_nat"] - TARGETS["rate_n_nat"]) / 0.004,
        (m["rate_k_nat"] - TARGETS["rate_k_nat"]) / 0.004,
        (m["rate_p_urban"] - TARGETS["rate_p_urban"]) / 0.004,
        (m["cum_dc_urban"] - TARGETS["cum_dc_urban"]) / 0.25,
        (m["yearly_ratio_2012"] - TARGETS["yearly_ratio_2012"]) / 0.0004,
        (m["eff_2022"] - TARGETS["eff_2022"]) / 0.0004,
        (m["share_2012_on"] - TARGETS["share_2012_on"]) / 0.002,
    ]
    # Band hinges: every yearly national ratio 2013+ confined to
    # [0.081, 0.099]; pre-2012 ratios strictly below the 2012 peak.
    for r in m["late_ratios"]:
        res.append(max(0.0, 0.081 - r) / 0.0005)
        res.append(max(0.0, r - 0.099) / 0.0005)
    res.append(max(0.0, m["pre2012_max"] - 0.105) / 0.0005)
    return np.array(res)


INITIAL = Params(
    k0=1.12, k03=1.10, k11=0.88, k12=0.84,
    ln_nu_2005=0.25, ln_nu_2011=1.39, ln_nu_2020=2.35, ln_nu_2022=2.52,
    ln_nr_2005=0.25, ln_nr_2011=1.30, ln_nr_2020=1.80, ln_nr_2022=1.90,
    p_uT=4.45, dip12_u=0.045, dip12_r=0.030,
)

BOUNDS_LO = np.array([0.9, 0.85, 0.80, 0.79,
                      0.05, 0.8, 1.6, 1.7,
                      0.05, 0.6, 0.9, 1.0,
                      3.4, 0.0, 0.0])
BOUNDS_HI = np.array([1.6, 1.45, 1.20, 1.10,
                      0.9, 1.9, 3.2, 3.4,
                      0.9, 1.9, 2.6, 2.8,
                      4.8, 0.12, 0.12])


def calibrate(x0: np.ndarray, scales=(1.0, 1.0, 1.0), verbose: bool = True) -> Params:
    fit = least_squares(residuals, x0, args=(scales,), bounds=(BOUNDS_LO, BOUNDS_HI),
                        diff_step=1e-4, xtol=1e-12, ftol=1e-12, gtol=1e-12,
                        max_nfev=2000)
    par = Params.from_vector(fit.x)
    if verbose:
        m = evaluate(par, scales, segments=VERIFY_SEGMENTS)
        print("calibration result (verify segments):")
        for key in ("rate_n_nat", "rate_k_nat", "rate_p_urban", "cum_dc_urban",
                    "yearly_ratio_2012", "eff_2022", "share_2012_on",
                    "band_lo", "band_hi", "peak_year", "pre2012_max",
                    "cum_dc_rural"):
            target = TARGETS.get(key)
            print(f"  {key:20s} {m[key]:10.4f}" + (f"   target {target}" if target else ""))
        print("  params:", {k: round(v, 5) for k, v in vars(par).items()})
    return par


def solve_scales(par: Params, scales) -> tuple[float, float, float]:
    """Income levels and household scale for the per-NSDP and total targets.

    Per-NSDP values scale inversely with the income level and the total
    decarbonization scales linearly with households, so both solve directly.
    """
    m = evaluate(par, scales)
    n_u0 = scales[0] * m["raw_per_nsdp_u"] / TARGETS["per_nsdp_urban"]
    n_r0 = scales[1] * m["raw_per_nsdp_r"] / TARGETS["per_nsdp_rural"]
    h22 = scales[2] * TARGETS["total_mt"] * 1e9 / m["raw_total"]
    return n_u0, n_r0, h22


# ---------------------------------------------------------------------------
# State distribution.
# ---------------------------------------------------------------------------
STATES = (
    "Andhra Pradesh", "Arunachal Pradesh", "Assam", "Bihar", "Chandigarh",
    "Chhattisgarh", "Delhi", "Goa", "Gujarat", "Haryana", "Himachal Pradesh",
    "Jammu & Kashmir & Ladakh", "Jharkhand", "Karnataka", "Kerala",
    "Madhya Pradesh", "Maharashtra", "Manipur", "Meghalaya", "Mizoram",
    "Nagaland", "Odisha", "Puducherry", "Punjab", "Rajasthan", "Sikkim",
    "Tamil Nadu", "Telangana", "Tripura", "Uttar Pradesh", "Uttarakhand",
    "West Bengal", "Andaman & Nicobar Islands",
)

# Hand flavor: hot/affluent states run high intensities, Himalayan states low.
INTENSITY_FLAVOR = {
    "Chandigarh": 2.45, "Goa": 2.2, "Delhi": 2.1, "Puducherry": 1.9,
    "Tamil Nadu": 1.5, "Andhra Pradesh": 1.5, "Gujarat": 1.4, "Kerala": 1.45,
    "Haryana": 1.3, "Punjab": 1.3, "Telangana": 1.35, "Maharashtra": 1.1,
    "Rajasthan": 1.05, "Madhya Pradesh": 0.95, "Bihar": 0.8, "Uttar Pradesh": 0.85,
    "Sikkim": 0.12, "Himachal Pradesh": 0.25, "Meghalaya": 0.3,
    "Arunachal Pradesh": 0.3, "Uttarakhand": 0.45, "Jammu & Kashmir & Ladakh": 0.35,
    "Mizoram": 0.4, "Nagaland": 0.45, "Manipur": 0.5,
}
INCOME_FLAVOR = {
    "Goa": 2.4, "Sikkim": 2.3, "Delhi": 2.2, "Chandigarh": 2.1, "Puducherry": 1.6,
    "Haryana": 1.5, "Kerala": 1.4, "Tamil Nadu": 1.3, "Gujarat": 1.3,
    "Maharashtra": 1.3, "Bihar": 0.45, "Uttar Pradesh": 0.55, "Jharkhand": 0.6,
    "Madhya Pradesh": 0.7, "Assam": 0.7, "Odisha": 0.7,
}
HOUSEHOLD_WEIGHT_FLAVOR = {
    "Uttar Pradesh": 11.0, "Bihar": 6.0, "Maharashtra": 7.5, "West Bengal": 6.0,
    "Madhya Pradesh": 4.8, "Tamil Nadu": 4.6, "Rajasthan": 4.2, "Karnataka": 4.0,
    "Gujarat": 3.8, "Andhra Pradesh": 3.4, "Odisha": 2.7, "Telangana": 2.4,
    "Kerala": 2.2, "Jharkhand": 2.0, "Assam": 1.9, "Punjab": 1.8,
    "Chhattisgarh": 1.7, "Haryana": 1.6, "Delhi": 1.1, "Jammu & Kashmir & Ladakh": 0.8,
    "Uttarakhand": 0.7, "Himachal Pradesh": 0.45, "Tripura": 0.25, "Meghalaya": 0.2,
    "Manipur": 0.18, "Nagaland": 0.13, "Goa": 0.1, "Arunachal Pradesh": 0.09,
    "Puducherry": 0.09, "Mizoram": 0.08, "Chandigarh": 0.07, "Sikkim": 0.04,
    "Andaman & Nicobar Islands": 0.03,
}


@dataclass
class StateMix:
    weight: dict          # locale -> household weight (sums to 1 across states)
    sigma: dict           # locale -> appliance -> intensity multiplier
    pi: dict              # locale -> household-size multiplier
    nu: dict              # locale -> income multiplier


def state_mixes(rng: np.random.Generator) -> dict[str, StateMix]:
    raw_w, raw_sigma, raw_pi, raw_nu = {}, {}, {}, {}
    for s in STATES:
        base_w = HOUSEHOLD_WEIGHT_FLAVOR.get(s, 0.5)
        flavor = INTENSITY_FLAVOR.get(s, 1.0)
        income = INCOME_FLAVOR.get(s, 1.0)
        raw_w[s] = {
            "urban": base_w * rng.uniform(0.9, 1.1),
            "rural": base_w * rng.uniform(0.9, 1.1),
        }
        raw_sigma[s] = {}
        for locale in ("urban", "rural"):
            spread = rng.uniform(0.9, 1.1, size=3)
            ac_tilt = 1.0 + 0.5 * (flavor - 1.0)     # affluent states lean AC-heavy
            raw_sigma[s][locale] = {
                "room_ac": flavor * ac_tilt * spread[0],
                "fan": flavor * spread[1],
                "air_cooler": flavor * rng.uniform(0.7, 1.3) * spread[2],
            }
        raw_pi[s] = {loc: rng.uniform(0.93, 1.08) for loc in ("urban", "rural")}
        raw_nu[s] = {loc: income * rng.uniform(0.92, 1.08) for loc in ("urban", "rural")}

    mixes: dict[str, StateMix] = {}
    for locale in ("urban", "rural"):
        total_w = sum(raw_w[s][locale] for s in STATES)
        for s in STATES:
            raw_w[s][locale] /= total_w
        for appliance in APPLIANCES:
            norm = sum(raw_w[s][locale] * raw_sigma[s][locale][appliance] for s in STATES)
            for s in STATES:
                raw_sigma[s][locale][appliance] /= norm
        norm_p = sum(raw_w[s][locale] * raw_pi[s][locale] for s in STATES)
        for s in STATES:
            raw_pi[s][locale] /= norm_p
        norm_n = sum(raw_w[s][locale] * raw_pi[s][locale] * raw_nu[s][locale] for s in STATES)
        for s in STATES:
            raw_nu[s][locale] /= norm_n
    for s in STATES:
        mixes[s] = StateMix(weight=raw_w[s], sigma=raw_sigma[s],
                            pi=raw_pi[s], nu=raw_nu[s])
    return mixes


# Plausible technology paths used to factor component energies into the raw
# input columns (stocks absorb the state multipliers).
def tech_paths():
    tau = T / 22.0
    return {
        "fan_power": 78.0 - 8.0 * tau,
        "fan_hours": {"urban": 3400.0 + 500.0 * tau, "rural": 3200.0 + 600.0 * tau},
        "cooler_power": 190.0 - 20.0 * tau,
        "cooler_hours": {"urban": 1400.0 + 200.0 * tau, "rural": 1350.0 + 250.0 * tau},
        "ac_load": {"urban": np.full(N_YEARS, 140.0), "rural": np.full(N_YEARS, 120.0)},
        "iseer": 2.7 + 1.3 * tau,
    }


def write_csv(panel: Panel, mixes: dict[str, StateMix], path: Path) -> None:
    tech = tech_paths()
    header = ("state,year,locale,ac_floorspace_m2,ac_load_kwh_m2,iseer,"
              "fans_per_100hh,fan_hours,fan_power_w,coolers_per_100hh,cooler_hours,"
              "cooler_power_w,population,households,nsdp_inr,emission_factor_kg_per_kwh")
    lines = [
        "# cooldecomp-schema v1",
        "# provenance _source: synthetic demonstration panel calibrated to headline "
        "national statistics; not survey data",
        header,
    ]
    for state in STATES:
        mix = mixes[state]
        for locale in ("urban", "rural"):
            for i, year in enumerate(YEARS):
                k = panel.k[i]
                energy = {a: panel.carbon[locale][a][i] / k * mix.sigma[locale][a]
                          for a in APPLIANCES}
                iseer = tech["iseer"][i]
                ac_load = tech["ac_load"][locale][i]
                f_r = energy["room_ac"] * iseer / ac_load
                fan_u = energy["fan"] * 1000.0 / (tech["fan_hours"][locale][i]
                                                  * tech["fan_power"][i])
                cool_u = energy["air_cooler"] * 1000.0 / (tech["cooler_hours"][locale][i]
                                                          * tech["cooler_power"][i])
                hh = panel.households[locale][i] * mix.weight[locale]
                pop = panel.p[locale][i] * mix.pi[locale] * hh
                nsdp = panel.n[locale][i] * mix.nu[locale] * pop
                cells = [
                    state, str(int(year)), locale,
                    repr(float(f_r)), repr(float(ac_load)), repr(float(iseer)),
                    repr(float(fan_u * 100.0)), repr(float(tech["fan_hours"][locale][i])),
                    repr(float(tech["fan_power"][i])),
                    repr(float(cool_u * 100.0)), repr(float(tech["cooler_hours"][locale][i])),
                    repr(float(tech["cooler_power"][i])),
                    repr(float(pop)), repr(float(hh)), repr(float(nsdp)), repr(float(k)),
                ]
                lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(lines) - 3} rows)")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="src/cooldecomp/data/india_cooling_panel_v1.csv")
    parser.add_argument("--rounds", type=int, default=3,
                        help="outer calibrate/rescale rounds")
    args = parser.parse_args()

    # The urban/rural income levels shape the national income mix, which
    # feeds back into the national contribution rates, so calibration and
    # scale solving alternate until both settle.
    scales = (1.0, 1.0, 1.0)
    x0 = INITIAL.vector()
    par = INITIAL
    for round_no in range(args.rounds):
        print(f"=== round {round_no + 1} ===")
        par = calibrate(x0, scales, verbose=(round_no == args.rounds - 1))
        scales = solve_scales(par, scales)
        print("scales:", scales)
        x0 = par.vector()
    panel = build_panel(par, n_u0=scales[0], n_r0=scales[1], h22=scales[2])
    mixes = state_mixes(np.random.default_rng(20220822))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(panel, mixes, out)
    print("stored parameters:", {k: repr(v) for k, v in vars(par).items()})
    print("stored scales:", scales)


if __name__ == "__main__":
    main()
