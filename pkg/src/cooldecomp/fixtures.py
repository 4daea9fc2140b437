"""Access to the bundled demonstration panel.

The shipped panel is synthetic: 33 states x urban/rural x 2000-2022,
calibrated so its national aggregates reproduce published headline
statistics for Indian residential space cooling (intensity levels, driver
contribution rates, cumulative decarbonization).  It exists to make the
full pipeline executable end to end; it is not survey data and carries no
statistical authority.  See tools/make_fixture.py for its construction.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .ingest import PanelDataset, load

FIXTURE_NAME = "india_cooling_panel_v1.csv"


def fixture_path() -> Path:
    """Filesystem path of the bundled demonstration panel."""
    return Path(resources.files("cooldecomp").joinpath("data", FIXTURE_NAME))  # type: ignore[arg-type]


def load_fixture() -> PanelDataset:
    """Load the bundled demonstration panel."""
    return load(fixture_path())
