"""Loaders for the bundled calibrated datasets under modeshift/data."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

from .equity import TractProfile, load_tracts_csv
from .inventory import (
    ActivityRecord,
    EmissionFactor,
    EmissionInventory,
    build_baseline,
    load_activity_csv,
    load_factors_csv,
)
from .scenario import GoalSet, OffsetPlan, ScenarioSpec, load_scenario_spec

DATA_DIR = Path(__file__).parent / "data"

SCENARIO_NAMES = ("bau", "scenario1", "scenario2", "scenario3", "scenario4")


class UnknownDataset(KeyError):
    pass


def data_path(*parts: str) -> Path:
    path = DATA_DIR.joinpath(*parts)
    if not path.exists():
        raise UnknownDataset(f"bundled data file missing: {path}")
    return path


def houston2014_meta() -> dict:
    return json.loads(data_path("houston2014", "sectors.json").read_text(encoding="utf-8"))


def houston2014_activity() -> list[ActivityRecord]:
    return load_activity_csv(data_path("houston2014", "activity.csv"))


def houston2014_factors() -> list[EmissionFactor]:
    return load_factors_csv(data_path("houston2014", "factors.csv"))


def houston2014_zone_geometries() -> dict[str, dict]:
    geo = json.loads(data_path("houston2014", "zones.geojson").read_text(encoding="utf-8"))
    return {f["properties"]["zone"]: f["geometry"] for f in geo["features"]}


@lru_cache(maxsize=1)
def houston2014_baseline() -> EmissionInventory:
    meta = houston2014_meta()
    return build_baseline(
        houston2014_activity(),
        houston2014_factors(),
        meta["baseline_year"],
        sector_totals=meta["sector_totals_mtco2e"],
    )


def scenario_spec(name: str) -> ScenarioSpec:
    if name not in SCENARIO_NAMES:
        raise UnknownDataset(f"unknown bundled scenario {name!r}; have {SCENARIO_NAMES}")
    return load_scenario_spec(data_path("scenarios", f"{name}.json"))


def default_goals() -> GoalSet:
    return GoalSet.from_json_dict(json.loads(data_path("goals.json").read_text(encoding="utf-8")))


def default_offset_plan() -> OffsetPlan:
    raw = json.loads(data_path("offset_plan.json").read_text(encoding="utf-8"))
    return OffsetPlan(
        grid_intensity_mtco2e_per_gwh=raw["grid_intensity_mtco2e_per_gwh"],
        solar_yield_gwh_per_acre=raw["solar_yield_gwh_per_acre"],
    )


def bundled_tracts() -> list[TractProfile]:
    return load_tracts_csv(data_path("tracts", "tracts.csv"))


def tract_geometries() -> dict[str, dict]:
    geo = json.loads(data_path("tracts", "tracts.geojson").read_text(encoding="utf-8"))
    return {f["properties"]["tract_id"]: f["geometry"] for f in geo["features"]}


def intermodal_matrix_data() -> dict:
    return json.loads(data_path("intermodal_matrix.json").read_text(encoding="utf-8"))


def world_dir(name: str) -> Path:
    return data_path("worlds", name)


def lever_preset(name: str) -> dict:
    return json.loads(data_path("levers", f"{name}.json").read_text(encoding="utf-8"))
