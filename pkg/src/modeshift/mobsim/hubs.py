"""Park-and-ride hub transfers and the intermodal pairing matrix.

The committed pairing table marks each (access mode, hub service) cell as
primary or supporting; primary pairings win space allocation within a tick,
with arrival order breaking ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .queueing import ChargerQueueState

PRIMARY = "primary"
SUPPORTING = "supporting"


class UnknownPairing(KeyError):
    pass


class IntermodalMatrix:
    def __init__(self, pairings: dict[tuple[str, str], str], access_modes: list[str], services: list[str]):
        self._pairings = pairings
        self.access_modes = access_modes
        self.services = services

    @classmethod
    def from_data(cls, data: dict) -> "IntermodalMatrix":
        services = [svc for group in data["services"].values() for svc in group]
        pairings = {}
        for key, tier in data["pairings"].items():
            mode, service = key.split("|", 1)
            pairings[(mode, service)] = tier
        return cls(pairings, list(data["access_modes"]), services)

    def tier(self, access_mode: str, service: str) -> str:
        try:
            return self._pairings[(access_mode, service)]
        except KeyError:
            raise UnknownPairing(f"no pairing for ({access_mode!r}, {service!r})") from None

    def to_data(self) -> dict:
        return {
            "access_modes": list(self.access_modes),
            "services": {"all": list(self.services)},
            "pairings": {f"{m}|{s}": t for (m, s), t in sorted(self._pairings.items())},
        }


@dataclass
class HubState:
    """Mutable day-of state for one hub."""

    hub_id: str
    zone: str
    spaces: int
    chargers: ChargerQueueState
    occupied: int = 0
    peak_occupancy: int = 0
    parked_in: int = 0
    parked_out: int = 0
    transfers: int = 0
    denied: int = 0

    def release_space(self) -> None:
        if self.occupied <= 0:
            raise RuntimeError(f"hub {self.hub_id}: releasing an empty lot")
        self.occupied -= 1
        self.parked_out += 1

    def stats(self, horizon_min: float) -> dict:
        pool = self.chargers.pool
        return {
            "hub_id": self.hub_id,
            "zone": self.zone,
            "spaces": self.spaces,
            "transfers": self.transfers,
            "parked_in": self.parked_in,
            "parked_out": self.parked_out,
            "occupancy_end": self.occupied,
            "peak_occupancy": self.peak_occupancy,
            "parking_denied": self.denied,
            "charger_ports": self.chargers.ports,
            "charge_sessions_started": pool.started,
            "charge_sessions_completed": pool.completed(horizon_min),
            "charge_sessions_in_progress": pool.in_progress(horizon_min),
            "charge_wait_mean_min": pool.mean_wait(),
            "charge_wait_max_min": pool.max_wait(),
            "charger_utilization": self.chargers.utilization(0.0, horizon_min),
        }


@dataclass(frozen=True)
class ParkRequest:
    access_mode: str
    arrival_seq: int
    agent_id: int


@dataclass(frozen=True)
class TransferOutcome:
    parked: bool
    charging: bool
    boarded_route: str | None = None
    wait_min: float = 0.0
    rerouted: bool = False


def allocate_parking(
    state: HubState,
    requests: list[ParkRequest],
    matrix: IntermodalMatrix,
    service: str = "park_n_ride",
) -> tuple[list[ParkRequest], list[ParkRequest]]:
    """Grant spaces to a same-tick batch: primary pairings first, then
    arrival order. Returns (granted, denied)."""
    ranked = sorted(
        requests,
        key=lambda r: (0 if matrix.tier(r.access_mode, service) == PRIMARY else 1, r.arrival_seq),
    )
    granted = []
    denied = []
    for req in ranked:
        if state.occupied < state.spaces:
            state.occupied += 1
            state.parked_in += 1
            if state.occupied > state.peak_occupancy:
                state.peak_occupancy = state.occupied
            granted.append(req)
        else:
            state.denied += 1
            denied.append(req)
    return granted, denied


def hub_transfer(
    state: HubState,
    access_mode: str,
    matrix: IntermodalMatrix,
    arrival_seq: int = 0,
    agent_id: int = -1,
    wants_charge: bool = False,
    charge_minutes: float = 0.0,
    now_min: float = 0.0,
    service: str = "park_n_ride",
) -> TransferOutcome:
    """Single-arrival transfer: park (if space), optionally start charging.

    The engine batches same-tick arrivals through allocate_parking; this
    wrapper handles the batch-of-one case and standalone use.
    """
    granted, _ = allocate_parking(state, [ParkRequest(access_mode, arrival_seq, agent_id)], matrix, service)
    if not granted:
        return TransferOutcome(parked=False, charging=False, rerouted=True)
    charging = False
    wait = 0.0
    if wants_charge and state.chargers.ports > 0:
        wait = state.chargers.arrive(now_min, charge_minutes)
        charging = True
    state.transfers += 1
    return TransferOutcome(parked=True, charging=charging, wait_min=wait)
