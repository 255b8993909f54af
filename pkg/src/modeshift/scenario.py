"""Emission trajectory projection, milestone compliance, and offset sizing.

Projections scale the baseline inventory by population growth, per-capita
VMT multipliers, per-class emission-rate multipliers, and the electric
share of light-duty VMT. EV fleet share displaces tailpipe emissions for
PassengerCar, LightTruck and FleetVehicle; the upstream grid burden of
that electricity is handled on the supply side through size_offsets.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .inventory import EmissionInventory, VehicleClass
from .trajectory import InvalidTrajectory, Trajectory

#: Classes whose tailpipe emissions are displaced by the EV fleet share.
LIGHT_DUTY_EV_CLASSES = frozenset(
    {VehicleClass.PASSENGER_CAR, VehicleClass.LIGHT_TRUCK, VehicleClass.FLEET_VEHICLE}
)


class ScenarioError(Exception):
    pass


class NonPositivePopulation(ScenarioError):
    pass


class MilestoneOutsideSeries(ScenarioError):
    pass


class NonPositivePlanParameter(ScenarioError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    """Named bundle of trajectories describing one policy scenario."""

    name: str
    population: Trajectory
    vmt_per_capita_multiplier: Trajectory
    efficiency_multiplier: Mapping[VehicleClass, Trajectory]
    ev_fleet_share: Trajectory
    notes: str = ""

    def validate(self) -> None:
        if self.population.min_value() <= 0:
            raise InvalidTrajectory("population must be > 0 everywhere")
        if self.vmt_per_capita_multiplier.min_value() < 0:
            raise InvalidTrajectory("vmt multiplier must be >= 0")
        for cls_, traj in self.efficiency_multiplier.items():
            if traj.min_value() < 0:
                raise InvalidTrajectory(f"efficiency multiplier for {cls_.value} must be >= 0")
        if self.ev_fleet_share.min_value() < 0 or self.ev_fleet_share.max_value() > 1:
            raise InvalidTrajectory("ev_fleet_share must lie in [0, 1]")

    def efficiency(self, vehicle_class: VehicleClass, year: float) -> float:
        traj = self.efficiency_multiplier.get(vehicle_class)
        return traj.value(year) if traj is not None else 1.0

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "notes": self.notes,
            "population": self.population.to_pairs(),
            "vmt_per_capita_multiplier": self.vmt_per_capita_multiplier.to_pairs(),
            "efficiency_multiplier": {
                c.value: t.to_pairs() for c, t in sorted(self.efficiency_multiplier.items(), key=lambda kv: kv[0].value)
            },
            "ev_fleet_share": self.ev_fleet_share.to_pairs(),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ScenarioSpec":
        spec = cls(
            name=data["name"],
            notes=data.get("notes", ""),
            population=Trajectory.from_pairs(data["population"]),
            vmt_per_capita_multiplier=Trajectory.from_pairs(data["vmt_per_capita_multiplier"]),
            efficiency_multiplier={
                VehicleClass(c): Trajectory.from_pairs(p) for c, p in data["efficiency_multiplier"].items()
            },
            ev_fleet_share=Trajectory.from_pairs(data["ev_fleet_share"]),
        )
        spec.validate()
        return spec


def load_scenario_spec(path: str | Path) -> ScenarioSpec:
    return ScenarioSpec.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_scenario_spec(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec.to_json_dict(), indent=2), encoding="utf-8")


@dataclass(frozen=True)
class EmissionSeries:
    """Per-year on-road emissions, VMT, and reduction vs the baseline."""

    name: str
    years: tuple[int, ...]
    emissions_mtco2e: tuple[float, ...]
    vmt: tuple[float, ...]
    baseline_total: float
    population: tuple[float, ...] = ()
    ev_share: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if any(b - a != 1 for a, b in zip(self.years, self.years[1:])):
            raise ScenarioError("series years must be contiguous")

    def _index(self, year: int) -> int:
        if year < self.years[0] or year > self.years[-1]:
            raise MilestoneOutsideSeries(f"year {year} outside series {self.years[0]}..{self.years[-1]}")
        return year - self.years[0]

    def emissions(self, year: int) -> float:
        return self.emissions_mtco2e[self._index(year)]

    def reduction(self, year: int) -> float:
        return 1.0 - self.emissions(year) / self.baseline_total

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "baseline_total": self.baseline_total,
            "years": list(self.years),
            "emissions_mtco2e": list(self.emissions_mtco2e),
            "vmt": list(self.vmt),
            "reduction": [1.0 - e / self.baseline_total for e in self.emissions_mtco2e],
        }


@dataclass(frozen=True)
class OffsetPlan:
    """Supply-side conversion constants for sizing renewable offsets."""

    grid_intensity_mtco2e_per_gwh: float
    solar_yield_gwh_per_acre: float

    def __post_init__(self) -> None:
        if self.grid_intensity_mtco2e_per_gwh <= 0 or self.solar_yield_gwh_per_acre <= 0:
            raise NonPositivePlanParameter("offset plan parameters must be > 0")


@dataclass(frozen=True)
class GoalSet:
    """Milestone targets: reduction vs baseline, ZEV share, per-capita VMT cut."""

    reduction: Mapping[int, float] = field(default_factory=dict)
    zev_share: Mapping[int, float] = field(default_factory=dict)
    vmt_per_capita_reduction: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for table in (self.reduction, self.zev_share, self.vmt_per_capita_reduction):
            for year, frac in table.items():
                if not 0 <= frac <= 1:
                    raise ScenarioError(f"goal fraction for {year} must be in [0,1], got {frac}")

    def interpolated_reduction(self, year: int) -> float:
        """Linear interpolation between reduction milestones (flat outside)."""
        pairs = sorted(self.reduction.items())
        return Trajectory.from_pairs(pairs).value(year)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GoalSet":
        def table(key: str) -> dict[int, float]:
            return {int(y): float(v) for y, v in data.get(key, {}).items()}

        return cls(
            reduction=table("reduction"),
            zev_share=table("zev_share"),
            vmt_per_capita_reduction=table("vmt_per_capita_reduction"),
        )

    def to_json_dict(self) -> dict:
        return {
            "reduction": {str(y): v for y, v in sorted(self.reduction.items())},
            "zev_share": {str(y): v for y, v in sorted(self.zev_share.items())},
            "vmt_per_capita_reduction": {str(y): v for y, v in sorted(self.vmt_per_capita_reduction.items())},
        }


def project_bau(
    baseline: EmissionInventory,
    population: Trajectory,
    base_population: float,
    years: Sequence[int] = tuple(range(2014, 2051)),
) -> EmissionSeries:
    """Business-as-usual: VMT growth tracks population, everything else frozen."""
    if base_population <= 0:
        raise NonPositivePopulation(f"base_population must be > 0, got {base_population}")
    emissions = []
    vmt = []
    pops = []
    for year in years:
        pop_factor = population.value(year) / base_population
        emissions.append(baseline.total_mtco2e * pop_factor)
        vmt.append(baseline.vmt_total * pop_factor)
        pops.append(population.value(year))
    return EmissionSeries(
        name="bau",
        years=tuple(years),
        emissions_mtco2e=tuple(emissions),
        vmt=tuple(vmt),
        baseline_total=baseline.total_mtco2e,
        population=tuple(pops),
    )


def apply_scenario(
    baseline: EmissionInventory,
    spec: ScenarioSpec,
    base_population: float,
    years: Sequence[int] = tuple(range(2014, 2051)),
) -> EmissionSeries:
    """Project a policy scenario year by year.

    Per year: VMT = baseline VMT x (pop / base_pop) x vmt multiplier; each
    class keeps its baseline VMT share and emission rate, scaled by its
    efficiency multiplier and, for light-duty classes, the change in the
    fuel-burning share of the fleet. Baseline tailpipe emissions already
    reflect the baseline-year EV share, so displacement is normalized to
    it: (1 - ev(year)) / (1 - ev(baseline_year)). A spec holding ev at the
    baseline share therefore reproduces BAU exactly.
    """
    if base_population <= 0:
        raise NonPositivePopulation(f"base_population must be > 0, got {base_population}")
    spec.validate()

    ev_base = spec.ev_fleet_share.value(baseline.baseline_year)
    emissions = []
    vmt_series = []
    pops = []
    evs = []
    for year in years:
        pop_factor = spec.population.value(year) / base_population
        vmt_mult = spec.vmt_per_capita_multiplier.value(year)
        scale = pop_factor * vmt_mult
        ev = spec.ev_fleet_share.value(year)
        displacement = (1.0 - ev) / (1.0 - ev_base) if ev_base < 1.0 else 0.0
        total = 0.0
        for cls_, base_emissions in sorted(baseline.by_class.items(), key=lambda kv: kv[0].value):
            eff = spec.efficiency(cls_, year)
            displaced = displacement if cls_ in LIGHT_DUTY_EV_CLASSES else 1.0
            total += base_emissions * scale * eff * displaced
        emissions.append(total)
        vmt_series.append(baseline.vmt_total * scale)
        pops.append(spec.population.value(year))
        evs.append(ev)
    return EmissionSeries(
        name=spec.name,
        years=tuple(years),
        emissions_mtco2e=tuple(emissions),
        vmt=tuple(vmt_series),
        baseline_total=baseline.total_mtco2e,
        population=tuple(pops),
        ev_share=tuple(evs),
    )


#: Milestones pass when achieved >= required - PASS_TOLERANCE (absolute).
PASS_TOLERANCE = 0.002


@dataclass(frozen=True)
class MilestoneResult:
    kind: str
    year: int
    required: float
    achieved: float
    passed: bool

    @property
    def gap(self) -> float:
        return self.achieved - self.required


def check_goals(
    series: EmissionSeries,
    goals: GoalSet,
    tolerance: float = PASS_TOLERANCE,
) -> list[MilestoneResult]:
    """Compliance report for every milestone the series can answer.

    Reduction milestones always apply. Per-capita VMT milestones need the
    series to carry population; ZEV milestones need the ev share. Results
    are sorted (kind, year) so the report is order-independent.
    """
    results = []
    for year, required in sorted(goals.reduction.items()):
        achieved = series.reduction(year)
        results.append(
            MilestoneResult("reduction", year, required, achieved, achieved >= required - tolerance)
        )
    if series.population:
        base_vmt_pc = series.vmt[0] / series.population[0]
        for year, required in sorted(goals.vmt_per_capita_reduction.items()):
            i = series._index(year)
            achieved = 1.0 - (series.vmt[i] / series.population[i]) / base_vmt_pc
            results.append(
                MilestoneResult("vmt_per_capita", year, required, achieved, achieved >= required - tolerance)
            )
    if series.ev_share:
        for year, required in sorted(goals.zev_share.items()):
            achieved = series.ev_share[series._index(year)]
            results.append(
                MilestoneResult("zev_share", year, required, achieved, achieved >= required - tolerance)
            )
    return sorted(results, key=lambda r: (r.kind, r.year))


def compliance_to_csv(results: Sequence[MilestoneResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "milestone_year", "required", "achieved", "pass"])
        for r in results:
            writer.writerow([r.kind, r.year, f"{r.required:.6f}", f"{r.achieved:.6f}", str(r.passed).lower()])


def compliance_to_json_dict(results: Sequence[MilestoneResult]) -> list[dict]:
    return [
        {
            "kind": r.kind,
            "milestone_year": r.year,
            "required": r.required,
            "achieved": r.achieved,
            "pass": r.passed,
            "gap": r.gap,
        }
        for r in results
    ]


def size_offsets(residual_mtco2e: float, plan: OffsetPlan) -> dict[str, float]:
    """Renewable generation and solar land needed to neutralize a residual."""
    if residual_mtco2e < 0:
        raise ScenarioError(f"residual must be >= 0, got {residual_mtco2e}")
    gwh = residual_mtco2e / plan.grid_intensity_mtco2e_per_gwh
    acres = gwh / plan.solar_yield_gwh_per_acre
    return {"gwh_per_year": gwh, "acres": acres, "square_miles": acres / 640.0}
