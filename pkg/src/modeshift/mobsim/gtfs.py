"""GTFS-lite reader: stops, routes, trips, stop_times with headway math.

A deliberately small subset of GTFS: stops carry a zone id, stop_times use
minutes-from-midnight, and service is treated as bidirectional along each
route's corridor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from statistics import median


@dataclass(frozen=True)
class TransitRoute:
    route_id: str
    zones: tuple[str, ...]
    offsets_min: tuple[float, ...]  # cumulative minutes from route start
    departures: tuple[float, ...]  # scheduled first-stop departure times
    headway_min: float

    def offset(self, zone: str) -> float:
        return self.offsets_min[self.zones.index(zone)]

    def serves(self, origin: str, dest: str) -> bool:
        return origin in self.zones and dest in self.zones and origin != dest

    def in_vehicle_min(self, origin: str, dest: str) -> float:
        return abs(self.offset(dest) - self.offset(origin))


class TransitNetwork:
    def __init__(self, routes: dict[str, TransitRoute]):
        self.routes = routes
        self._zone_routes: dict[str, list[str]] = {}
        for rid, route in routes.items():
            for zone in route.zones:
                self._zone_routes.setdefault(zone, []).append(rid)
        for lst in self._zone_routes.values():
            lst.sort()

    def routes_at(self, zone: str) -> list[str]:
        return self._zone_routes.get(zone, [])

    def connections(self, origin: str, dest: str) -> list[TransitRoute]:
        """Single-route connections between two zones, either direction."""
        out = []
        for rid in self.routes_at(origin):
            route = self.routes[rid]
            if route.serves(origin, dest):
                out.append(route)
        return out

    def next_departure_wait(
        self,
        route: TransitRoute,
        zone: str,
        t_min: float,
        headway_multiplier: float = 1.0,
    ) -> float | None:
        """Minutes until the next departure of ``route`` at ``zone``.

        The committed schedule fixes the first and last departures; the
        headway multiplier rescales the gap between departures, so values
        below 1 model denser service.
        """
        first = route.departures[0] + route.offset(zone)
        last = route.departures[-1] + route.offset(zone)
        if t_min <= first:
            return first - t_min
        effective = route.headway_min * headway_multiplier
        elapsed = t_min - first
        k = int(elapsed // effective)
        next_dep = first + (k + 1) * effective
        if abs(elapsed - k * effective) < 1e-9:
            next_dep = first + k * effective  # exactly at a departure
        if next_dep > last + 1e-9:
            return None
        return next_dep - t_min


def _read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_gtfs_lite(path: str | Path) -> TransitNetwork:
    path = Path(path)
    stop_zone = {row["stop_id"]: row["zone"] for row in _read_rows(path / "stops.txt")}
    trip_route = {row["trip_id"]: row["route_id"] for row in _read_rows(path / "trips.txt")}
    route_ids = [row["route_id"] for row in _read_rows(path / "routes.txt")]

    by_trip: dict[str, list[tuple[int, float, str]]] = {}
    for row in _read_rows(path / "stop_times.txt"):
        by_trip.setdefault(row["trip_id"], []).append(
            (int(row["stop_sequence"]), float(row["arrival_min"]), row["stop_id"])
        )

    routes: dict[str, TransitRoute] = {}
    for route_id in route_ids:
        trips = sorted(t for t, r in trip_route.items() if r == route_id)
        if not trips:
            continue
        starts = []
        pattern: tuple[tuple[str, float], ...] | None = None
        for trip_id in trips:
            stops = sorted(by_trip[trip_id])
            start = stops[0][1]
            starts.append(start)
            shape = tuple((stop_zone[sid], arr - start) for _, arr, sid in stops)
            if pattern is None:
                pattern = shape
        starts.sort()
        gaps = [b - a for a, b in zip(starts, starts[1:])]
        headway = float(median(gaps)) if gaps else 60.0
        routes[route_id] = TransitRoute(
            route_id=route_id,
            zones=tuple(z for z, _ in pattern),
            offsets_min=tuple(o for _, o in pattern),
            departures=tuple(starts),
            headway_min=headway,
        )
    return TransitNetwork(routes)
