"""Synthetic agent population and the daily origin-destination schedule."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..equity import TractProfile
from .world import Agent, VehicleType, WorldConfig, Zone


class EmptyZones(ValueError):
    pass


def generate_population(
    zones: Sequence[Zone],
    tracts: Mapping[str, TractProfile],
    n_agents: int,
    seed: int,
    config: WorldConfig,
) -> list[Agent]:
    """Deterministic synthetic population for a fixed seed.

    Home zones are sampled proportional to zone population, work zones
    proportional to employment. Vehicle ownership blends the income band's
    base rates with the linked tract's sub-two-car rate.
    """
    if n_agents <= 0:
        raise ValueError("n_agents must be > 0")
    zone_list = list(zones)
    weights = [z.population for z in zone_list]
    if not zone_list or sum(weights) <= 0:
        raise EmptyZones("zone populations sum to zero")
    work_weights = [z.employment for z in zone_list]
    if sum(work_weights) <= 0:
        work_weights = weights

    bands = list(config.income_bands)
    band_shares = [config.income_bands[b]["share"] for b in bands]

    rng = random.Random(seed)
    agents = []
    for i in range(n_agents):
        home = rng.choices(zone_list, weights=weights)[0]
        work = rng.choices(zone_list, weights=work_weights)[0]
        while work.id == home.id and len(zone_list) > 1:
            work = rng.choices(zone_list, weights=work_weights)[0]
        band = rng.choices(bands, weights=band_shares)[0]
        band_cfg = config.income_bands[band]

        sub_two_car = 0.5
        if home.tract_id and home.tract_id in tracts:
            sub_two_car = tracts[home.tract_id].sub_two_car_rate
        p_no_vehicle = min(1.0, band_cfg["no_vehicle"] * (0.5 + sub_two_car))
        roll = rng.random()
        if roll < p_no_vehicle:
            vehicle = VehicleType.NONE
        elif rng.random() < band_cfg["ev_ownership"]:
            vehicle = VehicleType.EV
        else:
            vehicle = VehicleType.GASOLINE_CAR

        agents.append(
            Agent(
                id=i,
                home_zone=home.id,
                work_zone=work.id,
                income_band=band,
                vehicle=vehicle,
                value_of_time=band_cfg["value_of_time"] * (0.75 + 0.5 * rng.random()),
                employed=rng.random() < config.employment_rate,
            )
        )
    return agents


@dataclass(frozen=True)
class TripLeg:
    agent_id: int
    origin: str
    dest: str
    depart_min: int
    leg: int  # 0 = AM outbound, 1 = PM return


@dataclass(frozen=True)
class ODMatrix:
    """Trip counts per (origin, destination, hour) plus the leg schedule."""

    trips: Mapping[tuple[str, str, int], int]
    legs: tuple[TripLeg, ...]

    def row_sum(self, origin: str) -> int:
        return sum(c for (o, _, _), c in self.trips.items() if o == origin)

    def total(self) -> int:
        return sum(self.trips.values())


def build_od(
    agents: Sequence[Agent],
    am_window: tuple[int, int] = (360, 540),
    pm_window: tuple[int, int] = (960, 1140),
    seed: int = 0,
) -> ODMatrix:
    """One home->work AM leg and one return PM leg per employed agent.

    Departure minutes draw uniformly within each window; marginals match
    the employed agent count exactly.
    """
    if not agents:
        raise EmptyZones("no agents")
    rng = random.Random(seed ^ 0x5EED0D)
    trips: dict[tuple[str, str, int], int] = {}
    legs = []
    for agent in agents:
        if not agent.employed:
            continue
        am = rng.randrange(am_window[0], am_window[1])
        pm = rng.randrange(pm_window[0], pm_window[1])
        legs.append(TripLeg(agent.id, agent.home_zone, agent.work_zone, am, 0))
        legs.append(TripLeg(agent.id, agent.work_zone, agent.home_zone, pm, 1))
        k_am = (agent.home_zone, agent.work_zone, am // 60)
        k_pm = (agent.work_zone, agent.home_zone, pm // 60)
        trips[k_am] = trips.get(k_am, 0) + 1
        trips[k_pm] = trips.get(k_pm, 0) + 1
    legs.sort(key=lambda leg: (leg.depart_min, leg.agent_id, leg.leg))
    return ODMatrix(trips=trips, legs=tuple(legs))
