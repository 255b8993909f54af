"""Mode choice: feasible option construction and logit utilities.

Utilities are U = -(in-trip hours x value of time + out-of-pocket money);
the logit scale divides inside the kernel. Options keep a fixed order with
drive modes first so a fixed uniform draw couples choices monotonically
when a lever perturbs drive costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .._kernels import logit_choice
from .world import Agent, PolicyLevers, VehicleType, World


class Mode(str, Enum):
    DRIVE_GAS = "DriveGas"
    DRIVE_EV = "DriveEV"
    PARK_RIDE = "ParkAndRide"
    TRANSIT = "TransitDirect"
    ACTIVE = "Active"


#: CDF walk order for the logit draw; drive modes lead (see module note).
MODE_ORDER = (Mode.DRIVE_GAS, Mode.DRIVE_EV, Mode.PARK_RIDE, Mode.TRANSIT, Mode.ACTIVE)


class NoFeasibleMode(RuntimeError):
    pass


@dataclass(frozen=True)
class ModeOption:
    mode: Mode
    time_min: float
    money_usd: float
    drive_path: tuple[int, ...] | None = None
    hub_id: str | None = None
    route_id: str | None = None
    transit_wait_min: float = 0.0
    in_vehicle_min: float = 0.0


def drive_money(
    world: World,
    path: Sequence[int],
    per_mile: float,
    levers: PolicyLevers,
    dest_is_parked: bool,
) -> float:
    """Fuel plus congestion charge plus destination parking."""
    cfg = world.config
    miles = sum(world.edges[e].distance_miles for e in path)
    money = miles * per_mile
    crossed = {world.edges[e].to_zone for e in path} | {world.edges[e].from_zone for e in path}
    if crossed & cfg.priced_zones:
        money += levers.congestion_price
    if dest_is_parked and path:
        dest = world.edges[path[-1]].to_zone
        if dest in cfg.priced_zones:
            money += cfg.parking_fee_priced_zone
    return money


def ev_ownership_cost(world: World, levers: PolicyLevers) -> float:
    """Per-trip share of the EV purchase premium after incentives."""
    cfg = world.config
    offset = levers.ev_incentive_usd * cfg.incentive_per_trip_factor
    premium = cfg.ev_premium_per_trip - offset
    return premium if premium > 0 else 0.0


def build_mode_options(
    agent: Agent,
    origin: str,
    dest: str,
    depart_min: float,
    world: World,
    levers: PolicyLevers,
    edge_time_min: Callable[[int], float],
    hub_free_space: Callable[[str], bool],
) -> list[ModeOption]:
    """Feasible options for one trip leg, in MODE_ORDER.

    Active travel is always feasible, so the list is never empty. Drive
    feasibility follows vehicle ownership; park-and-ride needs a hub with
    free space whose routes reach the destination zone; direct transit
    needs a single route serving both zones with a departure left today.
    """
    cfg = world.config
    options: list[ModeOption] = []

    path = world.path_edges(origin, dest)
    drive_time = None
    if path:
        drive_time = sum(edge_time_min(e) for e in path) + levers.parking_search_minutes

    if agent.vehicle is VehicleType.GASOLINE_CAR and path:
        options.append(
            ModeOption(
                mode=Mode.DRIVE_GAS,
                time_min=drive_time,
                money_usd=drive_money(world, path, cfg.gas_per_mile, levers, True),
                drive_path=tuple(path),
            )
        )
    if agent.vehicle is VehicleType.EV and path:
        options.append(
            ModeOption(
                mode=Mode.DRIVE_EV,
                time_min=drive_time,
                money_usd=drive_money(world, path, cfg.ev_per_mile, levers, True)
                + ev_ownership_cost(world, levers),
                drive_path=tuple(path),
            )
        )

    if agent.vehicle is not VehicleType.NONE:
        best = _best_park_and_ride(agent, origin, dest, depart_min, world, levers, edge_time_min, hub_free_space)
        if best is not None:
            options.append(best)

    transit = _best_direct_transit(origin, dest, depart_min, world, levers)
    if transit is not None:
        options.append(transit)

    miles = world.path_distance(origin, dest)
    if miles is None:
        miles = 3.0  # isolated pair; nominal crow-fly distance
    options.append(
        ModeOption(mode=Mode.ACTIVE, time_min=miles / cfg.active_speed_mph * 60.0, money_usd=0.0)
    )
    options.sort(key=lambda o: MODE_ORDER.index(o.mode))
    return options


def _best_direct_transit(
    origin: str,
    dest: str,
    depart_min: float,
    world: World,
    levers: PolicyLevers,
) -> ModeOption | None:
    cfg = world.config
    best: ModeOption | None = None
    arrive_stop = depart_min + cfg.walk_access_min
    for route in world.transit.connections(origin, dest):
        wait = world.transit.next_departure_wait(route, origin, arrive_stop, levers.transit_headway_multiplier)
        if wait is None:
            continue
        in_vehicle = route.in_vehicle_min(origin, dest)
        total = cfg.walk_access_min * 2 + wait + in_vehicle
        option = ModeOption(
            mode=Mode.TRANSIT,
            time_min=total,
            money_usd=cfg.transit_fare,
            route_id=route.route_id,
            transit_wait_min=wait,
            in_vehicle_min=in_vehicle,
        )
        if best is None or option.time_min < best.time_min:
            best = option
    return best


def _best_park_and_ride(
    agent: Agent,
    origin: str,
    dest: str,
    depart_min: float,
    world: World,
    levers: PolicyLevers,
    edge_time_min: Callable[[int], float],
    hub_free_space: Callable[[str], bool],
) -> ModeOption | None:
    cfg = world.config
    per_mile = cfg.ev_per_mile if agent.vehicle is VehicleType.EV else cfg.gas_per_mile
    best: ModeOption | None = None
    for hub in world.hubs.values():
        if hub.zone == origin or hub.zone == dest:
            continue
        if not hub_free_space(hub.id):
            continue
        drive_path = world.path_edges(origin, hub.zone)
        if not drive_path:
            continue
        drive_time = sum(edge_time_min(e) for e in drive_path)
        board_at = depart_min + drive_time + cfg.walk_access_min
        for route_id in hub.routes:
            route = world.transit.routes.get(route_id)
            if route is None or not route.serves(hub.zone, dest):
                continue
            wait = world.transit.next_departure_wait(route, hub.zone, board_at, levers.transit_headway_multiplier)
            if wait is None:
                continue
            in_vehicle = route.in_vehicle_min(hub.zone, dest)
            total = drive_time + cfg.walk_access_min * 2 + wait + in_vehicle
            money = drive_money(world, drive_path, per_mile, levers, False) + cfg.transit_fare
            if agent.vehicle is VehicleType.EV:
                money += ev_ownership_cost(world, levers)
            option = ModeOption(
                mode=Mode.PARK_RIDE,
                time_min=total,
                money_usd=money,
                drive_path=tuple(drive_path),
                hub_id=hub.id,
                route_id=route_id,
                transit_wait_min=wait,
                in_vehicle_min=in_vehicle,
            )
            if best is None or option.time_min < best.time_min:
                best = option
    return best


def utilities(agent: Agent, options: Sequence[ModeOption]) -> list[float]:
    return [-(o.time_min / 60.0 * agent.value_of_time + o.money_usd) for o in options]


def choose_mode(
    agent: Agent,
    options: Sequence[ModeOption],
    scale: float,
    draw: float,
) -> ModeOption:
    """Logit draw over the feasible options with a caller-supplied uniform."""
    if not options:
        raise NoFeasibleMode(f"agent {agent.id} has no feasible mode")
    idx = logit_choice(utilities(agent, options), scale, draw)
    return options[idx]
