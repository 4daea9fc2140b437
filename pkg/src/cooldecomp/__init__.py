"""Residential space-cooling carbon intensity: bottom-up model, driver
decomposition with a share group, and decarbonization metrics."""

from .errors import ComputationError, CooldecompError, SingularMatrixError, ValidationError
from .model import (
    AirCoolerParams,
    FanParams,
    GrowthStats,
    IntensityBreakdown,
    RoomAcParams,
    StateYearRecord,
    aggregate,
    air_cooler_intensity,
    fan_intensity,
    growth_stats,
    household_intensity,
    room_ac_intensity,
)
from .decomposition import (
    ContributionLedger,
    DecompositionProblem,
    FactorPath,
    ShareGroup,
    build_problem_from_breakdowns,
    decompose,
    oracle_integrate,
    scalar_problem,
)
from .metrics import (
    DecarbMetrics,
    YearlyEntry,
    cumulative_series,
    decarb_efficiency,
    decarb_intensity,
    decarb_per_nsdp,
    total_decarb,
)
from .ingest import PanelDataset, interpolate, load, serialize, validate
from .fixtures import fixture_path, load_fixture

__version__ = "0.1.0"
