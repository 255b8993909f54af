"""World model: zones, network, hubs, agents, and policy levers.

A world bundle is a directory: zones.geojson, edges.csv, hubs.csv,
agents.json, and a gtfs/ subdirectory with the GTFS-lite tables.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping

from .gtfs import TransitNetwork, load_gtfs_lite
from .hubs import IntermodalMatrix
from .. import datasets


class ValidationFailure(Exception):
    """World failed validation; carries the list of offending entities."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


class InvalidLeverValue(ValueError):
    pass


class VehicleType(str, Enum):
    GASOLINE_CAR = "GasolineCar"
    EV = "EV"
    NONE = "None"


@dataclass(frozen=True)
class Zone:
    id: str
    lat: float
    lon: float
    population: float
    employment: float
    tract_id: str | None = None

    def __post_init__(self) -> None:
        if self.population < 0 or self.employment < 0:
            raise ValueError(f"zone {self.id}: population and employment must be >= 0")


@dataclass(frozen=True)
class NetworkEdge:
    from_zone: str
    to_zone: str
    distance_miles: float
    freeflow_min: float
    capacity_vph: float

    def __post_init__(self) -> None:
        if self.distance_miles <= 0 or self.freeflow_min <= 0 or self.capacity_vph <= 0:
            raise ValueError(f"edge {self.from_zone}->{self.to_zone}: distance, time, capacity must be > 0")


@dataclass(frozen=True)
class Hub:
    id: str
    zone: str
    parking_spaces: int
    charger_ports: int
    routes: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.parking_spaces < 0 or self.charger_ports < 0:
            raise ValueError(f"hub {self.id}: spaces and ports must be >= 0")


@dataclass(frozen=True)
class Agent:
    id: int
    home_zone: str
    work_zone: str
    income_band: str
    vehicle: VehicleType
    value_of_time: float
    employed: bool

    def __post_init__(self) -> None:
        if self.value_of_time <= 0:
            raise ValueError(f"agent {self.id}: value_of_time must be > 0")


@dataclass(frozen=True)
class PolicyLevers:
    """Runtime-adjustable policy inputs, all applied at tick boundaries."""

    congestion_price: float = 0.0
    ev_incentive_usd: float = 0.0
    transit_headway_multiplier: float = 1.0
    parking_search_minutes: float = 5.0
    charger_ports_added: int = 0

    def __post_init__(self) -> None:
        if self.congestion_price < 0:
            raise InvalidLeverValue(f"congestion_price must be >= 0, got {self.congestion_price}")
        if self.ev_incentive_usd < 0:
            raise InvalidLeverValue(f"ev_incentive_usd must be >= 0, got {self.ev_incentive_usd}")
        if self.transit_headway_multiplier <= 0:
            raise InvalidLeverValue(
                f"transit_headway_multiplier must be > 0, got {self.transit_headway_multiplier}"
            )
        if self.parking_search_minutes < 0:
            raise InvalidLeverValue(f"parking_search_minutes must be >= 0, got {self.parking_search_minutes}")
        if self.charger_ports_added < 0:
            raise InvalidLeverValue(f"charger_ports_added must be >= 0, got {self.charger_ports_added}")

    def merged(self, changes: Mapping[str, float]) -> "PolicyLevers":
        known = set(self.__dataclass_fields__)
        unknown = set(changes) - known
        if unknown:
            raise InvalidLeverValue(f"unknown lever(s): {sorted(unknown)}")
        coerced = {}
        for key, value in changes.items():
            coerced[key] = int(value) if key == "charger_ports_added" else float(value)
        return replace(self, **coerced)

    def to_dict(self) -> dict:
        return {
            "congestion_price": self.congestion_price,
            "ev_incentive_usd": self.ev_incentive_usd,
            "transit_headway_multiplier": self.transit_headway_multiplier,
            "parking_search_minutes": self.parking_search_minutes,
            "charger_ports_added": self.charger_ports_added,
        }

    @classmethod
    def bounds(cls) -> dict[str, dict[str, float]]:
        """Service-declared lever ranges for clients building controls."""
        return {
            "congestion_price": {"min": 0.0, "max": 25.0, "step": 0.5},
            "ev_incentive_usd": {"min": 0.0, "max": 10_000.0, "step": 250.0},
            "transit_headway_multiplier": {"min": 0.25, "max": 3.0, "step": 0.05},
            "parking_search_minutes": {"min": 0.0, "max": 20.0, "step": 0.5},
            "charger_ports_added": {"min": 0, "max": 12, "step": 1},
        }


@dataclass(frozen=True)
class WorldConfig:
    """Parsed agents.json: population synthesis and cost/choice parameters."""

    n_agents: int
    employment_rate: float
    income_bands: Mapping[str, Mapping[str, float]]
    priced_zones: frozenset[str]
    gas_per_mile: float
    ev_per_mile: float
    transit_fare: float
    parking_fee_priced_zone: float
    ev_premium_per_trip: float
    incentive_per_trip_factor: float
    logit_scale: float
    walk_access_min: float
    active_speed_mph: float
    charge_session_minutes_mean: float
    charge_request_probability: float
    am_window: tuple[int, int]
    pm_window: tuple[int, int]
    sim_year: int
    reference_daily_mtco2e: float | None = None

    @classmethod
    def from_json_dict(cls, raw: Mapping) -> "WorldConfig":
        costs = raw["costs"]
        choice = raw["choice"]
        charging = raw.get("charging", {})
        return cls(
            n_agents=int(raw["n_agents"]),
            employment_rate=float(raw["employment_rate"]),
            income_bands=raw["income_bands"],
            priced_zones=frozenset(raw.get("priced_zones", [])),
            gas_per_mile=float(costs["gas_per_mile"]),
            ev_per_mile=float(costs["ev_per_mile"]),
            transit_fare=float(costs["transit_fare"]),
            parking_fee_priced_zone=float(costs.get("parking_fee_priced_zone", 0.0)),
            ev_premium_per_trip=float(costs.get("ev_premium_per_trip", 0.0)),
            incentive_per_trip_factor=float(costs.get("incentive_per_trip_factor", 0.0)),
            logit_scale=float(choice.get("scale", 2.0)),
            walk_access_min=float(choice.get("walk_access_min", 6.0)),
            active_speed_mph=float(choice.get("active_speed_mph", 9.0)),
            charge_session_minutes_mean=float(charging.get("session_minutes_mean", 150.0)),
            charge_request_probability=float(charging.get("request_probability", 1.0)),
            am_window=tuple(raw.get("am_window", [360, 540])),
            pm_window=tuple(raw.get("pm_window", [960, 1140])),
            sim_year=int(raw.get("sim_year", 2014)),
            reference_daily_mtco2e=raw.get("reference_daily_mtco2e"),
        )


_UNREACHABLE = float("inf")


class World:
    """Validated zone network with precomputed free-flow shortest paths.

    Route choice is static (free-flow paths); congestion enters through
    per-edge travel times at traversal, single-pass BPR style.
    """

    def __init__(
        self,
        name: str,
        zones: dict[str, Zone],
        edges: list[NetworkEdge],
        hubs: dict[str, Hub],
        transit: TransitNetwork,
        config: WorldConfig,
        matrix: IntermodalMatrix,
        zone_geometries: dict[str, dict] | None = None,
    ):
        self.name = name
        self.zones = zones
        self.edges = edges
        self.hubs = hubs
        self.transit = transit
        self.config = config
        self.matrix = matrix
        self.zone_geometries = zone_geometries or {}
        self._compute_paths()

    def _compute_paths(self) -> None:
        zone_ids = sorted(self.zones)
        index = {z: i for i, z in enumerate(zone_ids)}
        n = len(zone_ids)
        time = [[_UNREACHABLE] * n for _ in range(n)]
        nxt: list[list[int | None]] = [[None] * n for _ in range(n)]
        edge_at: list[list[int | None]] = [[None] * n for _ in range(n)]
        for i in range(n):
            time[i][i] = 0.0
        for ei, e in enumerate(self.edges):
            i, j = index[e.from_zone], index[e.to_zone]
            if e.freeflow_min < time[i][j]:
                time[i][j] = e.freeflow_min
                nxt[i][j] = j
                edge_at[i][j] = ei
        for k in range(n):
            tk = time[k]
            for i in range(n):
                tik = time[i][k]
                if tik == _UNREACHABLE:
                    continue
                ti = time[i]
                for j in range(n):
                    alt = tik + tk[j]
                    if alt < ti[j]:
                        ti[j] = alt
                        nxt[i][j] = nxt[i][k]
        self._zone_index = index
        self._zone_ids = zone_ids
        self._time = time
        self._next = nxt
        self._edge_at = edge_at

    def path_edges(self, origin: str, dest: str) -> list[int] | None:
        """Free-flow shortest path as a list of edge indexes, None if unreachable."""
        if origin == dest:
            return []
        i, j = self._zone_index[origin], self._zone_index[dest]
        if self._next[i][j] is None:
            return None
        path = []
        while i != j:
            k = self._next[i][j]
            path.append(self._edge_at[i][k])
            i = k
        return path

    def path_distance(self, origin: str, dest: str) -> float | None:
        path = self.path_edges(origin, dest)
        if path is None:
            return None
        return sum(self.edges[e].distance_miles for e in path)

    def freeflow_time(self, origin: str, dest: str) -> float:
        return self._time[self._zone_index[origin]][self._zone_index[dest]]

    def validate(self) -> None:
        """Raise ValidationFailure listing every offending entity."""
        problems = []
        for e in self.edges:
            for z in (e.from_zone, e.to_zone):
                if z not in self.zones:
                    problems.append(f"edge {e.from_zone}->{e.to_zone}: unknown zone {z}")
        for hub in self.hubs.values():
            if hub.zone not in self.zones:
                problems.append(f"hub {hub.id}: unknown zone {hub.zone}")
            for route in hub.routes:
                if route not in self.transit.routes:
                    problems.append(f"hub {hub.id}: unknown route {route}")
        for route in self.transit.routes.values():
            for z in route.zones:
                if z not in self.zones:
                    problems.append(f"route {route.route_id}: unknown zone {z}")
        demand_zones = [z.id for z in self.zones.values() if z.population > 0 or z.employment > 0]
        for a in demand_zones:
            for b in demand_zones:
                if a != b and self.freeflow_time(a, b) == _UNREACHABLE:
                    problems.append(f"network: no path {a}->{b}")
        if problems:
            raise ValidationFailure(problems)


def load_world(path: str | Path) -> World:
    """Load and validate a world bundle directory."""
    path = Path(path)
    zones: dict[str, Zone] = {}
    geometries: dict[str, dict] = {}
    geo = json.loads((path / "zones.geojson").read_text(encoding="utf-8"))
    for feature in geo["features"]:
        props = feature["properties"]
        centroid = props.get("centroid")
        if centroid is None:
            ring = feature["geometry"]["coordinates"][0]
            centroid = [
                sum(p[0] for p in ring[:-1]) / (len(ring) - 1),
                sum(p[1] for p in ring[:-1]) / (len(ring) - 1),
            ]
        zone = Zone(
            id=props["zone"],
            lon=centroid[0],
            lat=centroid[1],
            population=float(props.get("population", 0)),
            employment=float(props.get("employment", 0)),
            tract_id=props.get("tract_id"),
        )
        zones[zone.id] = zone
        geometries[zone.id] = feature["geometry"]

    edges = []
    with open(path / "edges.csv", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            edges.append(
                NetworkEdge(
                    from_zone=row["from_zone"],
                    to_zone=row["to_zone"],
                    distance_miles=float(row["distance_miles"]),
                    freeflow_min=float(row["freeflow_min"]),
                    capacity_vph=float(row["capacity_vph"]),
                )
            )

    hubs = {}
    with open(path / "hubs.csv", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            hub = Hub(
                id=row["hub_id"],
                zone=row["zone"],
                parking_spaces=int(row["parking_spaces"]),
                charger_ports=int(row["charger_ports"]),
                routes=tuple(r for r in row["routes"].split("|") if r),
            )
            hubs[hub.id] = hub

    transit = load_gtfs_lite(path / "gtfs")
    config = WorldConfig.from_json_dict(json.loads((path / "agents.json").read_text(encoding="utf-8")))
    matrix = IntermodalMatrix.from_data(datasets.intermodal_matrix_data())

    world = World(
        name=path.name,
        zones=zones,
        edges=edges,
        hubs=hubs,
        transit=transit,
        config=config,
        matrix=matrix,
        zone_geometries=geometries,
    )
    world.validate()
    return world
