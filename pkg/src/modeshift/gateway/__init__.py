"""CLI and HTTP service exposing baseline, scenarios, equity, and live runs."""

from .config import GatewayConfig, load_config
from .runs import RunManager, RunState, TransitionError, UnknownRun

__all__ = ["GatewayConfig", "load_config", "RunManager", "RunState", "TransitionError", "UnknownRun"]
