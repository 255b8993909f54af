"""Deterministic one-day event-loop simulation.

Determinism contract: (world, lever schedule, seed) fixes every output bit.
Uniform draws for choices, reroutes, and charge sessions are counter-based
hashes of (seed, agent, leg, purpose), so paired runs that differ only in
a lever consume identical randomness per decision, which makes lever
responses monotone under coupling. Lever updates land in an ordered
mailbox and take effect at tick boundaries.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .._kernels import bpr_travel_time, logit_choice
from ..inventory import ActivityRecord, EmissionFactor, FuelType, VehicleClass
from . import choice as choice_mod
from .choice import Mode, ModeOption, build_mode_options, utilities
from .hubs import HubState, ParkRequest, allocate_parking
from .population import ODMatrix, TripLeg, build_od, generate_population
from .queueing import ChargerQueueState
from .world import Agent, PolicyLevers, VehicleType, World

DAY_TICKS = 1440

_EV_ACCESS_MODE = "ev_auto"
#: Gasoline autos share the auto-ownership column of the pairing table.
_GAS_ACCESS_MODE = "ev_auto"
_PARK_SERVICE = "park_n_ride"


def hashed_uniform(seed: int, *parts) -> float:
    text = f"{seed}|" + "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2.0**64


@dataclass(frozen=True)
class LeverSnapshot:
    snapshot_id: int
    levers: PolicyLevers
    requested_tick: int | None
    applied_tick: int | None = None

    def to_dict(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "levers": self.levers.to_dict(),
            "requested_tick": self.requested_tick,
            "applied_tick": self.applied_tick,
        }


@dataclass
class _Trip:
    agent: Agent
    leg: TripLeg
    chosen: Mode
    realized: Mode
    option: ModeOption
    path: list[int] = field(default_factory=list)
    path_pos: int = 0
    edge_entry_t: float = 0.0
    hub_id: str | None = None
    rerouted: bool = False
    car_at_hub: bool = False
    parked_in_lot: bool = False


@dataclass(frozen=True)
class SimResult:
    world_name: str
    seed: int
    n_agents: int
    horizon_tick: int
    trips_started: int
    trips_completed: int
    reroutes: int
    mode_counts: Mapping[str, int]
    mode_shares: Mapping[str, float]
    mode_vmt: Mapping[str, float]
    bus_vmt: float
    vehicle_vmt: float
    total_mtco2e: float
    zone_hour_mtco2e: Mapping[tuple[str, int], float]
    vmt_cells: tuple[tuple[str, str, str, int, float], ...]
    hub_stats: tuple[dict, ...]
    lever_history: tuple[dict, ...]
    choices: tuple[tuple[int, int, int, str], ...]

    def to_json_dict(self, include_choices: bool = True) -> dict:
        payload = {
            "world": self.world_name,
            "seed": self.seed,
            "n_agents": self.n_agents,
            "horizon_tick": self.horizon_tick,
            "trips_started": self.trips_started,
            "trips_completed": self.trips_completed,
            "reroutes": self.reroutes,
            "mode_counts": dict(self.mode_counts),
            "mode_shares": dict(self.mode_shares),
            "mode_vmt": dict(self.mode_vmt),
            "bus_vmt": self.bus_vmt,
            "vehicle_vmt": self.vehicle_vmt,
            "total_mtco2e": self.total_mtco2e,
            "zone_hour_mtco2e": [
                {"zone": z, "hour": h, "mtco2e": v}
                for (z, h), v in sorted(self.zone_hour_mtco2e.items())
            ],
            "vmt_cells": [list(c) for c in self.vmt_cells],
            "hubs": list(self.hub_stats),
            "lever_history": list(self.lever_history),
        }
        if include_choices:
            payload["choices"] = [list(c) for c in self.choices]
        return payload

    def result_hash(self) -> str:
        blob = json.dumps(self.to_json_dict(include_choices=True), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def activity_records(self) -> list[ActivityRecord]:
        """The simulation's own drive/bus VMT log as inventory activity."""
        return [
            ActivityRecord(VehicleClass(c), FuelType(f), z, h, vmt)
            for c, f, z, h, vmt in self.vmt_cells
        ]


class DaySimulation:
    """One simulated day over a world; single-writer, seed-deterministic."""

    def __init__(
        self,
        world: World,
        agents: Sequence[Agent],
        factors: Sequence[EmissionFactor],
        seed: int = 0,
        levers: PolicyLevers | None = None,
    ):
        world.validate()
        self.world = world
        self.agents = list(agents)
        self.seed = seed
        self._rates: dict[tuple[VehicleClass, FuelType], float] = {}
        for f in factors:
            if f.year == world.config.sim_year:
                self._rates[(f.vehicle_class, f.fuel)] = f.g_per_mile
        for needed in (
            (VehicleClass.PASSENGER_CAR, FuelType.GASOLINE),
            (VehicleClass.PASSENGER_CAR, FuelType.ELECTRIC),
            (VehicleClass.TRANSIT_BUS, FuelType.DIESEL),
        ):
            if needed not in self._rates:
                raise ValueError(f"factors missing {needed} for year {world.config.sim_year}")

        self.levers = levers or PolicyLevers()
        self._lever_lock = threading.Lock()
        self._mailbox: list[LeverSnapshot] = []
        self._lever_history: list[LeverSnapshot] = []
        self._lever_requests: dict[str, LeverSnapshot] = {}
        self._last_submitted: LeverSnapshot | None = None
        self._snapshot_counter = 0
        self._base_ports_added = self.levers.charger_ports_added

        self._events: list[tuple[float, int, str, object]] = []
        self._seq = 0
        self._next_tick = 0

        self._edge_occupancy = [0] * len(world.edges)
        self._cells: dict[tuple[VehicleClass, FuelType, str, int], float] = {}
        self._mode_counts: dict[Mode, int] = {m: 0 for m in Mode}
        self._mode_vmt: dict[Mode, float] = {m: 0.0 for m in Mode}
        self._bus_vmt = 0.0
        self._trips_started = 0
        self._trips_completed = 0
        self._reroutes = 0
        self._choices: list[tuple[int, int, int, str]] = []
        self._outbound: dict[int, _Trip] = {}
        self._pending_parks: dict[str, list[tuple[ParkRequest, _Trip]]] = {}

        self._hub_states: dict[str, HubState] = {}
        for hub in world.hubs.values():
            ports = hub.charger_ports + self.levers.charger_ports_added
            self._hub_states[hub.id] = HubState(
                hub_id=hub.id,
                zone=hub.zone,
                spaces=hub.parking_spaces,
                chargers=ChargerQueueState(ports=ports),
            )

        self._route_next_dep: dict[str, float] = {}
        self._route_zone_miles: dict[str, list[tuple[str, float]]] = {}
        for route in world.transit.routes.values():
            self._route_next_dep[route.route_id] = route.departures[0]
            zone_miles: dict[str, float] = {}
            for a, b in zip(route.zones, route.zones[1:]):
                path = world.path_edges(a, b) or []
                for e in path:
                    edge = world.edges[e]
                    zone_miles[edge.from_zone] = zone_miles.get(edge.from_zone, 0.0) + edge.distance_miles
            self._route_zone_miles[route.route_id] = sorted(zone_miles.items())

        self._record_lever_snapshot(self.levers, requested_tick=0, applied_tick=0)

    # -- public control surface --------------------------------------------

    def apply_levers(
        self,
        changes: Mapping[str, float],
        effective_tick: int | None = None,
        request_id: str | None = None,
    ) -> LeverSnapshot:
        """Queue a lever update for the next (or a given) tick boundary.

        Identical resubmission of the current lever values is a no-op that
        returns the existing snapshot; a request_id makes retries return
        the originally acknowledged snapshot.
        """
        with self._lever_lock:
            if request_id is not None and request_id in self._lever_requests:
                return self._lever_requests[request_id]
            base = self._last_submitted.levers if self._last_submitted else self.levers
            merged = base.merged(changes)
            if self._last_submitted is not None and merged == self._last_submitted.levers:
                snap = self._last_submitted
            else:
                snap = LeverSnapshot(
                    snapshot_id=self._snapshot_counter,
                    levers=merged,
                    requested_tick=effective_tick,
                )
                self._snapshot_counter += 1
                self._mailbox.append(snap)
                self._last_submitted = snap
            if request_id is not None:
                self._lever_requests[request_id] = snap
            return snap

    def current_lever_snapshot_id(self) -> int:
        return self._lever_history[-1].snapshot_id if self._lever_history else 0

    # -- run loop ------------------------------------------------------------

    def run(
        self,
        snapshot_cadence: int | None = None,
        on_snapshot: Callable[[dict], None] | None = None,
        pause_check: Callable[[], None] | None = None,
    ) -> SimResult:
        od = build_od(
            self.agents,
            am_window=self.world.config.am_window,
            pm_window=self.world.config.pm_window,
            seed=self.seed,
        )
        am_legs = {}
        for leg in od.legs:
            if leg.leg == 0:
                am_legs[leg.agent_id] = leg
            self._push(float(leg.depart_min), "depart", leg)

        last_time = 0.0
        while True:
            if self._events:
                te = self._events[0][0]
                while self._next_tick <= te:
                    self._boundary(self._next_tick, snapshot_cadence, on_snapshot, pause_check)
                    self._next_tick += 1
                time_, _, kind, payload = heapq.heappop(self._events)
                last_time = max(last_time, time_)
                self._dispatch(time_, kind, payload)
            elif any(self._pending_parks.values()):
                self._boundary(self._next_tick, snapshot_cadence, on_snapshot, pause_check)
                self._next_tick += 1
            else:
                break

        horizon = max(DAY_TICKS, math.ceil(last_time))
        while self._next_tick <= horizon:
            self._boundary(self._next_tick, snapshot_cadence, on_snapshot, pause_check)
            self._next_tick += 1

        assert self._trips_started == self._trips_completed, "trip conservation violated"
        return self._build_result(horizon)

    # -- internals -----------------------------------------------------------

    def _push(self, t: float, kind: str, payload) -> None:
        heapq.heappush(self._events, (t, self._seq, kind, payload))
        self._seq += 1

    def _record_lever_snapshot(self, levers: PolicyLevers, requested_tick, applied_tick) -> None:
        snap = LeverSnapshot(
            snapshot_id=self._snapshot_counter,
            levers=levers,
            requested_tick=requested_tick,
            applied_tick=applied_tick,
        )
        self._snapshot_counter += 1
        self._lever_history.append(snap)
        self._last_submitted = snap

    def _boundary(self, tick: int, cadence, on_snapshot, pause_check) -> None:
        if pause_check is not None:
            pause_check()
        with self._lever_lock:
            ready = [s for s in self._mailbox if s.requested_tick is None or s.requested_tick <= tick]
            for snap in ready:
                self._mailbox.remove(snap)
                applied = LeverSnapshot(snap.snapshot_id, snap.levers, snap.requested_tick, tick)
                self._apply_lever_values(applied.levers, tick)
                self._lever_history.append(applied)
        self._emit_bus_trips(float(tick))
        self._resolve_parking(float(tick))
        if cadence and on_snapshot and tick > 0 and tick % cadence == 0:
            on_snapshot(self.snapshot(tick))

    def _apply_lever_values(self, levers: PolicyLevers, tick: int) -> None:
        delta_ports = levers.charger_ports_added - self._base_ports_added
        if delta_ports > 0:
            for state in self._hub_states.values():
                state.chargers.add_ports(delta_ports, float(tick))
            self._base_ports_added = levers.charger_ports_added
        self.levers = levers

    def _emit_bus_trips(self, now: float) -> None:
        for route in self.world.transit.routes.values():
            last = route.departures[-1]
            next_dep = self._route_next_dep[route.route_id]
            gap = route.headway_min * self.levers.transit_headway_multiplier
            while next_dep <= now and next_dep <= last:
                hour = int(next_dep) // 60 % 24
                for zone, miles in self._route_zone_miles[route.route_id]:
                    self._log_vmt(VehicleClass.TRANSIT_BUS, FuelType.DIESEL, zone, hour, miles)
                    self._bus_vmt += miles
                next_dep += gap
            self._route_next_dep[route.route_id] = next_dep

    def _edge_time(self, edge_index: int) -> float:
        edge = self.world.edges[edge_index]
        occupancy = self._edge_occupancy[edge_index]
        volume_vph = occupancy * 60.0 / edge.freeflow_min
        return bpr_travel_time(edge.freeflow_min, volume_vph, edge.capacity_vph)

    def _hub_free(self, hub_id: str) -> bool:
        state = self._hub_states[hub_id]
        return state.occupied < state.spaces

    def _log_vmt(self, cls_: VehicleClass, fuel: FuelType, zone: str, hour: int, miles: float) -> None:
        key = (cls_, fuel, zone, hour)
        self._cells[key] = self._cells.get(key, 0.0) + miles

    def _agent_fuel(self, agent: Agent) -> FuelType:
        return FuelType.ELECTRIC if agent.vehicle is VehicleType.EV else FuelType.GASOLINE

    # -- event handlers --------------------------------------------------

    def _dispatch(self, t: float, kind: str, payload) -> None:
        if kind == "depart":
            self._handle_depart(t, payload)
        elif kind == "edge_exit":
            self._handle_edge_exit(t, payload)
        elif kind == "start_drive":
            self._enter_edge(t, payload)
        elif kind == "trip_end":
            self._handle_trip_end(t, payload)
        else:  # pragma: no cover
            raise RuntimeError(f"unknown event kind {kind}")

    def _handle_depart(self, t: float, leg: TripLeg) -> None:
        agent = self.agents[leg.agent_id]
        self._trips_started += 1
        if leg.leg == 0:
            options = build_mode_options(
                agent, leg.origin, leg.dest, t, self.world, self.levers, self._edge_time, self._hub_free
            )
            draw = hashed_uniform(self.seed, agent.id, leg.leg, "mode")
            idx = logit_choice(utilities(agent, options), self.world.config.logit_scale, draw)
            option = options[idx]
            trip = _Trip(agent=agent, leg=leg, chosen=option.mode, realized=option.mode, option=option)
            self._outbound[agent.id] = trip
        else:
            trip = self._mirror_return(t, leg, agent)
        self._choices.append((leg.depart_min, agent.id, leg.leg, trip.realized.value))
        self._start_trip(t, trip)

    def _mirror_return(self, t: float, leg: TripLeg, agent: Agent) -> _Trip:
        """PM legs mirror the realized outbound mode; a car waiting at a hub
        is always retrieved (transit back to the hub, then drive home)."""
        outbound = self._outbound.get(agent.id)
        mode = outbound.realized if outbound else Mode.ACTIVE
        hub_id = outbound.hub_id if outbound else None
        car_at_hub = outbound.car_at_hub if outbound else False
        if car_at_hub and hub_id:
            option = ModeOption(mode=Mode.PARK_RIDE, time_min=0.0, money_usd=0.0, hub_id=hub_id)
        elif mode in (Mode.DRIVE_GAS, Mode.DRIVE_EV):
            option = self._drive_option(agent, leg.origin, leg.dest, mode)
        elif mode is Mode.TRANSIT:
            option = choice_mod._best_direct_transit(leg.origin, leg.dest, t, self.world, self.levers)
            if option is None:
                option = self._fallback_option(agent, leg)
        else:
            option = self._active_option(leg.origin, leg.dest)
        return _Trip(
            agent=agent,
            leg=leg,
            chosen=option.mode,
            realized=option.mode,
            option=option,
            hub_id=hub_id if option.mode is Mode.PARK_RIDE else option.hub_id,
            car_at_hub=car_at_hub,
            parked_in_lot=outbound.parked_in_lot if outbound else False,
        )

    def _drive_option(self, agent: Agent, origin: str, dest: str, mode: Mode) -> ModeOption:
        path = self.world.path_edges(origin, dest) or []
        per_mile = self.world.config.ev_per_mile if mode is Mode.DRIVE_EV else self.world.config.gas_per_mile
        time_min = sum(self._edge_time(e) for e in path) + self.levers.parking_search_minutes
        money = choice_mod.drive_money(self.world, path, per_mile, self.levers, True)
        if mode is Mode.DRIVE_EV:
            money += choice_mod.ev_ownership_cost(self.world, self.levers)
        return ModeOption(mode=mode, time_min=time_min, money_usd=money, drive_path=tuple(path))

    def _active_option(self, origin: str, dest: str) -> ModeOption:
        miles = self.world.path_distance(origin, dest) or 3.0
        return ModeOption(
            mode=Mode.ACTIVE,
            time_min=miles / self.world.config.active_speed_mph * 60.0,
            money_usd=0.0,
        )

    def _fallback_option(self, agent: Agent, leg: TripLeg) -> ModeOption:
        if agent.vehicle is VehicleType.GASOLINE_CAR:
            return self._drive_option(agent, leg.origin, leg.dest, Mode.DRIVE_GAS)
        if agent.vehicle is VehicleType.EV:
            return self._drive_option(agent, leg.origin, leg.dest, Mode.DRIVE_EV)
        return self._active_option(leg.origin, leg.dest)

    def _start_trip(self, t: float, trip: _Trip) -> None:
        option = trip.option
        mode = option.mode
        if mode in (Mode.DRIVE_GAS, Mode.DRIVE_EV):
            trip.path = list(option.drive_path or [])
            if not trip.path:
                self._complete(t, trip)
                return
            self._enter_edge(t, trip)
        elif mode is Mode.TRANSIT:
            self._mode_dwell_end(t, trip, option.time_min)
        elif mode is Mode.ACTIVE:
            self._mode_dwell_end(t, trip, option.time_min)
        elif mode is Mode.PARK_RIDE:
            if trip.leg.leg == 0:
                trip.hub_id = option.hub_id
                trip.path = list(option.drive_path or [])
                if not trip.path:
                    self._arrive_at_hub(t, trip)
                else:
                    self._enter_edge(t, trip)
            else:
                self._start_return_via_hub(t, trip)
        else:  # pragma: no cover
            raise RuntimeError(f"unhandled mode {mode}")

    def _mode_dwell_end(self, t: float, trip: _Trip, duration: float) -> None:
        self._push(t + duration, "trip_end", trip)

    def _enter_edge(self, t: float, trip: _Trip) -> None:
        e = trip.path[trip.path_pos]
        self._edge_occupancy[e] += 1
        trip.edge_entry_t = t
        self._push(t + self._edge_time(e), "edge_exit", trip)

    def _handle_edge_exit(self, t: float, trip: _Trip) -> None:
        e = trip.path[trip.path_pos]
        self._edge_occupancy[e] -= 1
        edge = self.world.edges[e]
        hour = int(trip.edge_entry_t) // 60 % 24
        self._log_vmt(
            VehicleClass.PASSENGER_CAR, self._agent_fuel(trip.agent), edge.from_zone, hour, edge.distance_miles
        )
        self._mode_vmt[trip.realized] += edge.distance_miles
        trip.path_pos += 1
        if trip.path_pos < len(trip.path):
            self._enter_edge(t, trip)
            return
        # path finished
        if trip.realized is Mode.PARK_RIDE and trip.leg.leg == 0 and not trip.car_at_hub:
            self._arrive_at_hub(t, trip)
        elif trip.realized is Mode.PARK_RIDE and trip.leg.leg == 1:
            self._complete(t, trip)  # drove home from the hub
        else:
            self._complete(t, trip)

    def _arrive_at_hub(self, t: float, trip: _Trip) -> None:
        access = _EV_ACCESS_MODE if trip.agent.vehicle is VehicleType.EV else _GAS_ACCESS_MODE
        request = ParkRequest(access_mode=access, arrival_seq=self._seq, agent_id=trip.agent.id)
        self._pending_parks.setdefault(trip.hub_id, []).append((request, trip))

    def _resolve_parking(self, now: float) -> None:
        for hub_id in sorted(self._pending_parks):
            batch = self._pending_parks[hub_id]
            if not batch:
                continue
            self._pending_parks[hub_id] = []
            state = self._hub_states[hub_id]
            granted, denied = allocate_parking(
                state, [req for req, _ in batch], self.world.matrix, _PARK_SERVICE
            )
            by_id = {req.agent_id: trip for req, trip in batch}
            for req in granted:
                self._board_from_hub(now, by_id[req.agent_id], state)
            for req in denied:
                self._reroute_from_hub(now, by_id[req.agent_id], state)

    def _board_from_hub(self, now: float, trip: _Trip, state: HubState) -> None:
        cfg = self.world.config
        trip.car_at_hub = True
        trip.parked_in_lot = True
        state.transfers += 1
        agent = trip.agent
        if agent.vehicle is VehicleType.EV and state.chargers.ports > 0:
            want = hashed_uniform(self.seed, agent.id, trip.leg.leg, "chgreq") < cfg.charge_request_probability
            if want:
                u = hashed_uniform(self.seed, agent.id, trip.leg.leg, "chg")
                service = -cfg.charge_session_minutes_mean * math.log(1.0 - u)
                state.chargers.arrive(now, service)
        hub = self.world.hubs[state.hub_id]
        option = self._hub_transit_option(hub, trip.leg.dest, now)
        if option is None:
            walk = self._active_option(state.zone, trip.leg.dest)
            self._push(now + walk.time_min, "trip_end", trip)
            return
        self._push(now + cfg.walk_access_min + option.transit_wait_min + option.in_vehicle_min + cfg.walk_access_min, "trip_end", trip)

    def _hub_transit_option(self, hub, dest: str, now: float) -> ModeOption | None:
        cfg = self.world.config
        best = None
        for route_id in hub.routes:
            route = self.world.transit.routes.get(route_id)
            if route is None or not route.serves(hub.zone, dest):
                continue
            wait = self.world.transit.next_departure_wait(
                route, hub.zone, now + cfg.walk_access_min, self.levers.transit_headway_multiplier
            )
            if wait is None:
                continue
            option = ModeOption(
                mode=Mode.PARK_RIDE,
                time_min=0.0,
                money_usd=0.0,
                route_id=route_id,
                transit_wait_min=wait,
                in_vehicle_min=route.in_vehicle_min(hub.zone, dest),
            )
            if best is None or (option.transit_wait_min + option.in_vehicle_min) < (
                best.transit_wait_min + best.in_vehicle_min
            ):
                best = option
        return best

    def _hub_transit_return(self, origin: str, hub, now: float) -> ModeOption | None:
        cfg = self.world.config
        best = None
        for route_id in hub.routes:
            route = self.world.transit.routes.get(route_id)
            if route is None or not route.serves(origin, hub.zone):
                continue
            wait = self.world.transit.next_departure_wait(
                route, origin, now + cfg.walk_access_min, self.levers.transit_headway_multiplier
            )
            if wait is None:
                continue
            option = ModeOption(
                mode=Mode.PARK_RIDE,
                time_min=0.0,
                money_usd=0.0,
                route_id=route_id,
                transit_wait_min=wait,
                in_vehicle_min=route.in_vehicle_min(origin, hub.zone),
            )
            if best is None or (option.transit_wait_min + option.in_vehicle_min) < (
                best.transit_wait_min + best.in_vehicle_min
            ):
                best = option
        return best

    def _reroute_from_hub(self, now: float, trip: _Trip, state: HubState) -> None:
        """Parking denied: logit re-draw between transit and driving on."""
        agent = trip.agent
        self._reroutes += 1
        trip.rerouted = True
        drive_mode = Mode.DRIVE_EV if agent.vehicle is VehicleType.EV else Mode.DRIVE_GAS
        drive = self._drive_option(agent, state.zone, trip.leg.dest, drive_mode)
        alternatives = [drive]
        transit = choice_mod._best_direct_transit(state.zone, trip.leg.dest, now, self.world, self.levers)
        if transit is not None:
            alternatives.append(transit)
        draw = hashed_uniform(self.seed, agent.id, trip.leg.leg, "reroute")
        idx = logit_choice(utilities(agent, alternatives), self.world.config.logit_scale, draw)
        picked = alternatives[idx]
        trip.realized = picked.mode
        trip.option = picked
        trip.path = list(picked.drive_path or [])
        trip.path_pos = 0
        if picked.mode is Mode.TRANSIT:
            # car left at the hub zone outside the managed lot
            trip.car_at_hub = True
            trip.parked_in_lot = False
            self._mode_dwell_end(now, trip, picked.time_min)
        else:
            if trip.path:
                self._enter_edge(now, trip)
            else:
                self._complete(now, trip)

    def _start_return_via_hub(self, t: float, trip: _Trip) -> None:
        """PM leg for an agent whose car waits at a hub: transit to the hub,
        then drive home."""
        cfg = self.world.config
        hub = self.world.hubs[trip.hub_id]
        option = self._hub_transit_return(trip.leg.origin, hub, t)
        if option is None:
            walk = self._active_option(trip.leg.origin, hub.zone)
            arrive = t + walk.time_min
        else:
            arrive = t + cfg.walk_access_min + option.transit_wait_min + option.in_vehicle_min
        # retrieve the car, then drive the remaining leg
        if trip.parked_in_lot:
            self._hub_states[hub.id].release_space()
        path = self.world.path_edges(hub.zone, trip.leg.dest) or []
        trip.path = path
        trip.path_pos = 0
        trip.car_at_hub = False
        if path:
            self._push(arrive, "start_drive", trip)
        else:
            self._push(arrive, "trip_end", trip)

    def _handle_trip_end(self, t: float, trip: _Trip) -> None:
        self._complete(t, trip)

    def _complete(self, t: float, trip: _Trip) -> None:
        self._trips_completed += 1
        self._mode_counts[trip.realized] += 1

    # -- outputs -----------------------------------------------------------

    def snapshot(self, tick: int) -> dict:
        total, zone_cum = self._emissions_now()
        legs = self._trips_started
        counts = {m.value: c for m, c in self._mode_counts.items()}
        done = sum(counts.values())
        shares = {m: (c / done if done else 0.0) for m, c in counts.items()}
        return {
            "tick": tick,
            "trips_started": legs,
            "trips_completed": self._trips_completed,
            "mode_counts": counts,
            "mode_shares": shares,
            "vehicle_vmt": sum(self._mode_vmt.values()),
            "bus_vmt": self._bus_vmt,
            "total_mtco2e": total,
            "zone_mtco2e": zone_cum,
            "hubs": [self._hub_states[h].stats(float(max(tick, 1))) for h in sorted(self._hub_states)],
            "lever_snapshot_id": self.current_lever_snapshot_id(),
            "levers": self.levers.to_dict(),
        }

    def _emissions_now(self) -> tuple[float, dict[str, float]]:
        total = 0.0
        zone_cum: dict[str, float] = {}
        for (cls_, fuel, zone, hour), vmt in sorted(
            self._cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value, kv[0][2], kv[0][3])
        ):
            mtco2e = vmt * self._rates[(cls_, fuel)] / 1e6
            total += mtco2e
            zone_cum[zone] = zone_cum.get(zone, 0.0) + mtco2e
        return total, zone_cum

    def _build_result(self, horizon: int) -> SimResult:
        total = 0.0
        grid: dict[tuple[str, int], float] = {}
        cells_out = []
        for (cls_, fuel, zone, hour), vmt in sorted(
            self._cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value, kv[0][2], kv[0][3])
        ):
            mtco2e = vmt * self._rates[(cls_, fuel)] / 1e6
            total += mtco2e
            grid[(zone, hour)] = grid.get((zone, hour), 0.0) + mtco2e
            cells_out.append((cls_.value, fuel.value, zone, hour, vmt))

        counts = {m.value: c for m, c in self._mode_counts.items()}
        done = sum(counts.values())
        shares = {m: (c / done if done else 0.0) for m, c in counts.items()}
        for state in self._hub_states.values():
            if state.parked_in != state.parked_out + state.occupied:
                raise AssertionError(f"hub {state.hub_id}: parking conservation violated")
        return SimResult(
            world_name=self.world.name,
            seed=self.seed,
            n_agents=len(self.agents),
            horizon_tick=horizon,
            trips_started=self._trips_started,
            trips_completed=self._trips_completed,
            reroutes=self._reroutes,
            mode_counts=counts,
            mode_shares=shares,
            mode_vmt={m.value: v for m, v in self._mode_vmt.items()},
            bus_vmt=self._bus_vmt,
            vehicle_vmt=sum(self._mode_vmt.values()),
            total_mtco2e=total,
            zone_hour_mtco2e=grid,
            vmt_cells=tuple(cells_out),
            hub_stats=tuple(self._hub_states[h].stats(float(horizon)) for h in sorted(self._hub_states)),
            lever_history=tuple(s.to_dict() for s in self._lever_history),
            choices=tuple(self._choices),
        )


def simulate_day(
    world: World,
    levers: PolicyLevers | None,
    factors: Sequence[EmissionFactor],
    seed: int,
    n_agents: int | None = None,
    tracts: Mapping[str, object] | None = None,
    snapshot_cadence: int | None = None,
    on_snapshot: Callable[[dict], None] | None = None,
) -> SimResult:
    """Build the population and run one day; the CLI/API entry point."""
    sim = build_simulation(world, levers, factors, seed, n_agents, tracts)
    return sim.run(snapshot_cadence=snapshot_cadence, on_snapshot=on_snapshot)


def build_simulation(
    world: World,
    levers: PolicyLevers | None,
    factors: Sequence[EmissionFactor],
    seed: int,
    n_agents: int | None = None,
    tracts: Mapping[str, object] | None = None,
) -> DaySimulation:
    agents = generate_population(
        list(world.zones.values()),
        tracts or {},
        n_agents or world.config.n_agents,
        seed,
        world.config,
    )
    return DaySimulation(world, agents, factors, seed=seed, levers=levers)
