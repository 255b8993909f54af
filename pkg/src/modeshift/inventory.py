"""Baseline on-road GHG emissions inventory.

The inventory is a ledger of MTCO2e cells keyed by (vehicle class, fuel,
zone, hour). Cells are computed from vehicle-miles-traveled activity and
per-mile emission factors; factors are inputs (MOVES-style tables), never
derived here.

Unit convention, fixed package-wide: factors in grams CO2e per vehicle-mile,
activity in vehicle-miles, inventory cells in metric tons CO2e
(grams -> MTCO2e conversion 1e-6).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

GRAMS_PER_MTCO2E = 1e6


class VehicleClass(str, Enum):
    PASSENGER_CAR = "PassengerCar"
    LIGHT_TRUCK = "LightTruck"
    SHORT_HAUL_TRUCK = "ShortHaulTruck"
    LONG_HAUL_TRUCK = "LongHaulTruck"
    FLEET_VEHICLE = "FleetVehicle"
    MOTORCYCLE_RV = "MotorcycleRV"
    TRANSIT_BUS = "TransitBus"


class FuelType(str, Enum):
    GASOLINE = "Gasoline"
    DIESEL = "Diesel"
    ELECTRIC = "Electric"


#: Reporting groups for class_share_report. Personal vehicles are cars,
#: small trucks, motorcycles and RVs; transit buses are counted with the
#: locally-controlled fleet group.
CLASS_GROUPS: dict[str, tuple[VehicleClass, ...]] = {
    "personal": (
        VehicleClass.PASSENGER_CAR,
        VehicleClass.LIGHT_TRUCK,
        VehicleClass.MOTORCYCLE_RV,
    ),
    "short_haul": (VehicleClass.SHORT_HAUL_TRUCK,),
    "long_haul": (VehicleClass.LONG_HAUL_TRUCK,),
    "fleet": (VehicleClass.FLEET_VEHICLE, VehicleClass.TRANSIT_BUS),
}


class InventoryError(Exception):
    """Base class for inventory construction and query errors."""


class MissingFactor(InventoryError):
    def __init__(self, vehicle_class: VehicleClass, fuel: FuelType, year: int):
        self.vehicle_class = vehicle_class
        self.fuel = fuel
        self.year = year
        super().__init__(f"no emission factor for ({vehicle_class.value}, {fuel.value}, {year})")


class NegativeVmt(InventoryError):
    pass


class EmptyOrZeroTotal(InventoryError):
    pass


class EmptyInventory(InventoryError):
    pass


class UnknownZone(InventoryError):
    pass


@dataclass(frozen=True)
class EmissionFactor:
    """Tailpipe emission rate for one (class, fuel, year) combination.

    ``pm25_g_per_mile`` is an optional proxy column; it feeds a single
    reported PM2.5 proxy total, nothing more.
    """

    vehicle_class: VehicleClass
    fuel: FuelType
    year: int
    g_per_mile: float
    pm25_g_per_mile: float = 0.0

    def __post_init__(self) -> None:
        if self.g_per_mile < 0 or self.pm25_g_per_mile < 0:
            raise ValueError(f"emission rates must be >= 0, got {self.g_per_mile}")
        if self.fuel is FuelType.ELECTRIC and self.g_per_mile != 0:
            raise ValueError("Electric rows carry tailpipe factor 0")


@dataclass(frozen=True)
class ActivityRecord:
    """Vehicle-miles traveled for one class/fuel in one zone and hour."""

    vehicle_class: VehicleClass
    fuel: FuelType
    zone: str
    hour: int
    vmt: float

    def __post_init__(self) -> None:
        if self.vmt < 0:
            raise NegativeVmt(f"vmt must be >= 0, got {self.vmt}")
        if not 0 <= self.hour <= 23:
            raise ValueError(f"hour must be in 0..23, got {self.hour}")


CellKey = tuple[VehicleClass, FuelType, str, int]


@dataclass(frozen=True)
class EmissionInventory:
    """Immutable per-cell MTCO2e ledger with precomputed totals.

    ``cells`` maps (class, fuel, zone, hour) to MTCO2e. ``vmt_by_class`` and
    ``vmt_total`` retain the underlying activity so downstream projections
    can scale VMT and emission rates independently.
    """

    baseline_year: int
    cells: Mapping[CellKey, float]
    total_mtco2e: float
    by_class: Mapping[VehicleClass, float]
    vmt_by_class: Mapping[VehicleClass, float]
    vmt_total: float
    zones: tuple[str, ...]
    sector_totals: Mapping[str, float] = field(default_factory=dict)
    pm25_proxy_mt: float = 0.0

    def class_rate(self, vehicle_class: VehicleClass) -> float:
        """Average emission rate (MTCO2e per mile) realized by one class."""
        vmt = self.vmt_by_class.get(vehicle_class, 0.0)
        if vmt == 0:
            return 0.0
        return self.by_class.get(vehicle_class, 0.0) / vmt


def build_baseline(
    activity: Iterable[ActivityRecord],
    factors: Iterable[EmissionFactor],
    year: int,
    zones: Iterable[str] | None = None,
    sector_totals: Mapping[str, float] | None = None,
) -> EmissionInventory:
    """Construct the baseline inventory for ``year`` from activity and factors.

    Every (class, fuel) present in the activity must have a factor for the
    year; a missing factor raises MissingFactor rather than contributing a
    silent zero. When ``zones`` is given, activity referencing an unknown
    zone raises UnknownZone.
    """
    rate_table: dict[tuple[VehicleClass, FuelType], float] = {}
    pm25_table: dict[tuple[VehicleClass, FuelType], float] = {}
    for f in factors:
        if f.year != year:
            continue
        key = (f.vehicle_class, f.fuel)
        if key in rate_table:
            raise ValueError(f"duplicate factor row for ({key[0].value}, {key[1].value}, {year})")
        rate_table[key] = f.g_per_mile
        pm25_table[key] = f.pm25_g_per_mile

    known_zones = set(zones) if zones is not None else None

    cells: dict[CellKey, float] = {}
    by_class: dict[VehicleClass, float] = {}
    vmt_by_class: dict[VehicleClass, float] = {}
    seen_zones: set[str] = set()
    pm25_total = 0.0
    for rec in activity:
        if known_zones is not None and rec.zone not in known_zones:
            raise UnknownZone(f"activity references unknown zone {rec.zone!r}")
        try:
            rate = rate_table[(rec.vehicle_class, rec.fuel)]
        except KeyError:
            raise MissingFactor(rec.vehicle_class, rec.fuel, year) from None
        mtco2e = rec.vmt * rate / GRAMS_PER_MTCO2E
        key = (rec.vehicle_class, rec.fuel, rec.zone, rec.hour)
        cells[key] = cells.get(key, 0.0) + mtco2e
        by_class[rec.vehicle_class] = by_class.get(rec.vehicle_class, 0.0) + mtco2e
        vmt_by_class[rec.vehicle_class] = vmt_by_class.get(rec.vehicle_class, 0.0) + rec.vmt
        seen_zones.add(rec.zone)
        pm25_total += rec.vmt * pm25_table[(rec.vehicle_class, rec.fuel)] / GRAMS_PER_MTCO2E

    total = sum(cells.values())
    all_zones = sorted(known_zones if known_zones is not None else seen_zones)
    return EmissionInventory(
        baseline_year=year,
        cells=cells,
        total_mtco2e=total,
        by_class=by_class,
        vmt_by_class=vmt_by_class,
        vmt_total=sum(vmt_by_class.values()),
        zones=tuple(all_zones),
        sector_totals=dict(sector_totals) if sector_totals else {},
        pm25_proxy_mt=pm25_total,
    )


def sector_shares(sectors: Mapping[str, float]) -> dict[str, float]:
    """Fractional split of sector MTCO2e totals; fractions sum to 1."""
    if not sectors:
        raise EmptyOrZeroTotal("no sectors given")
    for name, value in sectors.items():
        if value < 0:
            raise ValueError(f"sector {name!r} has negative total {value}")
    total = sum(sectors.values())
    if total <= 0:
        raise EmptyOrZeroTotal("sector totals sum to zero")
    return {name: value / total for name, value in sectors.items()}


def emissions_map(inventory: EmissionInventory) -> dict[tuple[str, int], float]:
    """Aggregate the inventory to a (zone, hour) grid covering every zone
    and every hour 0..23 (absent cells are zero)."""
    grid: dict[tuple[str, int], float] = {
        (zone, hour): 0.0 for zone in inventory.zones for hour in range(24)
    }
    for (_, _, zone, hour), mtco2e in inventory.cells.items():
        grid[(zone, hour)] += mtco2e
    return grid


def emissions_map_geojson(
    inventory: EmissionInventory,
    zone_geometries: Mapping[str, dict] | None = None,
) -> dict:
    """Export the (zone, hour) grid as a GeoJSON FeatureCollection.

    One feature per zone with properties hour_00..hour_23 and total_mtco2e.
    When no geometry is known for a zone, the feature carries a null
    geometry (the properties remain choropleth-ready).
    """
    grid = emissions_map(inventory)
    features = []
    for zone in inventory.zones:
        props: dict[str, object] = {"zone": zone}
        total = 0.0
        for hour in range(24):
            value = grid[(zone, hour)]
            props[f"hour_{hour:02d}"] = value
            total += value
        props["total_mtco2e"] = total
        geometry = None
        if zone_geometries is not None:
            geometry = zone_geometries.get(zone)
        features.append({"type": "Feature", "geometry": geometry, "properties": props})
    return {"type": "FeatureCollection", "features": features}


def class_share_report(inventory: EmissionInventory) -> dict[str, float]:
    """Fraction of on-road MTCO2e per reporting group (see CLASS_GROUPS)."""
    if inventory.total_mtco2e <= 0:
        raise EmptyInventory("inventory has no emissions")
    shares = {}
    for group, classes in CLASS_GROUPS.items():
        group_total = sum(inventory.by_class.get(c, 0.0) for c in classes)
        shares[group] = group_total / inventory.total_mtco2e
    return shares


# ---------------------------------------------------------------------------
# File interfaces: activity CSV (class,fuel,zone,hour,vmt) and factors CSV
# (class,fuel,year,g_per_mile), both with a required header row.
# ---------------------------------------------------------------------------

def load_activity_csv(path: str | Path) -> list[ActivityRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader, {"class", "fuel", "zone", "hour", "vmt"}, path)
        for row in reader:
            records.append(
                ActivityRecord(
                    vehicle_class=VehicleClass(row["class"]),
                    fuel=FuelType(row["fuel"]),
                    zone=row["zone"],
                    hour=int(row["hour"]),
                    vmt=float(row["vmt"]),
                )
            )
    return records


def load_factors_csv(path: str | Path) -> list[EmissionFactor]:
    factors = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader, {"class", "fuel", "year", "g_per_mile"}, path)
        for row in reader:
            factors.append(
                EmissionFactor(
                    vehicle_class=VehicleClass(row["class"]),
                    fuel=FuelType(row["fuel"]),
                    year=int(row["year"]),
                    g_per_mile=float(row["g_per_mile"]),
                    pm25_g_per_mile=float(row.get("pm25_g_per_mile") or 0.0),
                )
            )
    return factors


def write_activity_csv(path: str | Path, records: Iterable[ActivityRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "fuel", "zone", "hour", "vmt"])
        for rec in records:
            writer.writerow([rec.vehicle_class.value, rec.fuel.value, rec.zone, rec.hour, f"{rec.vmt:.3f}"])


def write_factors_csv(path: str | Path, factors: Iterable[EmissionFactor]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "fuel", "year", "g_per_mile"])
        for f in factors:
            writer.writerow([f.vehicle_class.value, f.fuel.value, f.year, f"{f.g_per_mile:.6f}"])


def inventory_summary(inventory: EmissionInventory) -> dict:
    """JSON-friendly roll-up used by the CLI and the HTTP service."""
    summary = {
        "baseline_year": inventory.baseline_year,
        "on_road_total_mtco2e": inventory.total_mtco2e,
        "vmt_total": inventory.vmt_total,
        "by_class": {c.value: v for c, v in sorted(inventory.by_class.items(), key=lambda kv: kv[0].value)},
        "class_group_shares": class_share_report(inventory) if inventory.total_mtco2e > 0 else {},
        "zones": list(inventory.zones),
    }
    if inventory.sector_totals:
        summary["sector_totals"] = dict(inventory.sector_totals)
        summary["sector_shares"] = sector_shares(inventory.sector_totals)
    if inventory.pm25_proxy_mt:
        summary["pm25_proxy_mt"] = inventory.pm25_proxy_mt
    return summary


def dump_inventory_json(inventory: EmissionInventory, path: str | Path) -> None:
    payload = inventory_summary(inventory)
    payload["cells"] = [
        {"class": c.value, "fuel": f.value, "zone": z, "hour": h, "mtco2e": v}
        for (c, f, z, h), v in sorted(
            inventory.cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value, kv[0][2], kv[0][3])
        )
    ]
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def _require_columns(reader: csv.DictReader, needed: set[str], path: str | Path) -> None:
    have = set(reader.fieldnames or [])
    missing = needed - have
    if missing:
        raise ValueError(f"{path}: missing required columns {sorted(missing)}")
