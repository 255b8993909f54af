"""Seedable agent-based daily simulation of multimodal travel.

World bundles (zones, edges, hubs, GTFS-lite transit, agent config) feed a
deterministic 1-minute-tick event loop with logit mode choice, BPR-style
congestion response, park-and-ride hub transfers, charger queues, and live
policy levers applied at tick boundaries.
"""

from .world import (
    Agent,
    Hub,
    NetworkEdge,
    PolicyLevers,
    InvalidLeverValue,
    ValidationFailure,
    VehicleType,
    World,
    Zone,
    load_world,
)
from .population import EmptyZones, build_od, generate_population, ODMatrix
from .choice import Mode, ModeOption, build_mode_options
from .queueing import ServicePool, charger_queue_step, ChargerQueueState
from .hubs import IntermodalMatrix, UnknownPairing, allocate_parking, hub_transfer
from .engine import DaySimulation, LeverSnapshot, SimResult

__all__ = [
    "Agent",
    "Hub",
    "NetworkEdge",
    "PolicyLevers",
    "InvalidLeverValue",
    "ValidationFailure",
    "VehicleType",
    "World",
    "Zone",
    "load_world",
    "EmptyZones",
    "build_od",
    "generate_population",
    "ODMatrix",
    "Mode",
    "ModeOption",
    "build_mode_options",
    "ServicePool",
    "charger_queue_step",
    "ChargerQueueState",
    "IntermodalMatrix",
    "UnknownPairing",
    "allocate_parking",
    "hub_transfer",
    "DaySimulation",
    "LeverSnapshot",
    "SimResult",
]
