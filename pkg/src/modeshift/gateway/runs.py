"""Run lifecycle management: state machine, worker threads, snapshot fan-out.

One ManagedRun owns one DaySimulation on its own thread; lever mutations
go through the simulation's mailbox, snapshots accumulate in an immutable
append-only list fanned out to any number of subscribers.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .. import datasets
from ..mobsim.engine import LeverSnapshot, SimResult, build_simulation
from ..mobsim.world import PolicyLevers, World, load_world
from .config import GatewayConfig


class RunState(str, Enum):
    CREATED = "Created"
    RUNNING = "Running"
    PAUSED = "Paused"
    COMPLETED = "Completed"
    FAILED = "Failed"


#: Legal state transitions triggered by clients or the worker itself.
_TRANSITIONS = {
    (RunState.CREATED, RunState.RUNNING),
    (RunState.RUNNING, RunState.PAUSED),
    (RunState.PAUSED, RunState.RUNNING),
    (RunState.RUNNING, RunState.COMPLETED),
    (RunState.RUNNING, RunState.FAILED),
    (RunState.PAUSED, RunState.FAILED),
}


class UnknownRun(KeyError):
    pass


class TransitionError(RuntimeError):
    def __init__(self, run_id: str, current: RunState, wanted: RunState):
        self.current = current
        self.wanted = wanted
        super().__init__(f"run {run_id}: illegal transition {current.value} -> {wanted.value}")


def load_world_by_ref(ref: str, config: GatewayConfig | None = None) -> World:
    """Resolve a world reference: bundled name first, then a directory path."""
    if config and config.worlds_dir and (Path(config.worlds_dir) / ref).is_dir():
        return load_world(Path(config.worlds_dir) / ref)
    try:
        return load_world(datasets.world_dir(ref))
    except datasets.UnknownDataset:
        if Path(ref).is_dir():
            return load_world(ref)
        raise


def bundled_tract_map() -> dict:
    return {t.tract_id: t for t in datasets.bundled_tracts()}


class ManagedRun:
    def __init__(
        self,
        run_id: str,
        world: World,
        seed: int,
        levers: PolicyLevers | None,
        cadence: int,
        tick_ms: float = 0.0,
        n_agents: int | None = None,
    ):
        self.run_id = run_id
        self.world = world
        self.seed = seed
        self.cadence = cadence
        self.tick_ms = tick_ms
        self.state = RunState.CREATED
        self.error: str | None = None
        self.result: SimResult | None = None
        self.sim = build_simulation(
            world,
            levers,
            datasets.houston2014_factors(),
            seed,
            n_agents=n_agents,
            tracts=bundled_tract_map(),
        )
        self._snapshots: list[dict] = []
        self._cond = threading.Condition()
        self._paused = threading.Event()
        self._thread: threading.Thread | None = None
        self._goals = datasets.default_goals()
        self._control_requests: set[str] = set()

    # -- lifecycle -----------------------------------------------------------

    def _transition(self, wanted: RunState) -> None:
        if (self.state, wanted) not in _TRANSITIONS:
            raise TransitionError(self.run_id, self.state, wanted)
        self.state = wanted

    def _control_replay(self, request_id: str | None) -> bool:
        """Retries with a seen request id are acknowledged as no-ops."""
        if request_id is None:
            return False
        if request_id in self._control_requests:
            return True
        self._control_requests.add(request_id)
        return False

    def start(self, request_id: str | None = None) -> None:
        with self._cond:
            if self._control_replay(request_id):
                return
            if self.state is RunState.PAUSED:
                self._transition(RunState.RUNNING)
                self._paused.clear()
                self._cond.notify_all()
                return
            self._transition(RunState.RUNNING)
            self._thread = threading.Thread(target=self._work, name=f"run-{self.run_id}", daemon=True)
            self._thread.start()

    def pause(self, request_id: str | None = None) -> None:
        with self._cond:
            if self._control_replay(request_id):
                return
            self._transition(RunState.PAUSED)
            self._paused.set()

    def join(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    def _pause_gate(self) -> None:
        if self.tick_ms > 0:
            time.sleep(self.tick_ms / 1000.0)
        while self._paused.is_set():
            with self._cond:
                if not self._paused.is_set():
                    break
                self._cond.wait(timeout=0.1)

    def _work(self) -> None:
        try:
            result = self.sim.run(
                snapshot_cadence=self.cadence,
                on_snapshot=self._on_snapshot,
                pause_check=self._pause_gate,
            )
            with self._cond:
                self.result = result
                self._transition(RunState.COMPLETED)
                final = self._frame(self.sim.snapshot(result.horizon_tick), final=True)
                self._snapshots.append(final)
                self._cond.notify_all()
        except Exception as exc:  # noqa: BLE001 - run failures become frames
            with self._cond:
                self.error = str(exc)
                self.state = RunState.FAILED
                self._snapshots.append(
                    {"run_id": self.run_id, "state": RunState.FAILED.value, "error": str(exc), "final": True,
                     "tick": self._snapshots[-1]["tick"] if self._snapshots else 0}
                )
                self._cond.notify_all()

    def _on_snapshot(self, snap: dict) -> None:
        with self._cond:
            self._snapshots.append(self._frame(snap))
            self._cond.notify_all()

    def _frame(self, snap: dict, final: bool = False) -> dict:
        ref = self.world.config.reference_daily_mtco2e
        gauge = {
            "goals": self._goals.to_json_dict()["reduction"],
            "reference_daily_mtco2e": ref,
        }
        if ref:
            gauge["achieved_daily_reduction"] = 1.0 - snap["total_mtco2e"] / ref
        frame = dict(snap)
        frame["run_id"] = self.run_id
        frame["state"] = (RunState.COMPLETED if final else RunState.RUNNING).value
        frame["final"] = final
        frame["milestone_gauge"] = gauge
        return frame

    # -- snapshot access ------------------------------------------------------

    def snapshots_since(self, since_tick: int) -> list[dict]:
        with self._cond:
            return [s for s in self._snapshots if s["tick"] > since_tick]

    def wait_snapshots(self, since_tick: int, timeout_s: float) -> list[dict]:
        """Long-poll: block until a snapshot newer than since_tick exists,
        the run reaches a terminal state, or the timeout passes."""
        deadline = time.monotonic() + timeout_s
        with self._cond:
            while True:
                fresh = [s for s in self._snapshots if s["tick"] > since_tick]
                if fresh or self.state in (RunState.COMPLETED, RunState.FAILED):
                    return fresh
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return []
                self._cond.wait(timeout=remaining)

    def stream_frames(self, from_tick: int | None = None) -> Iterable[dict]:
        """Ordered frames; a joiner without from_tick gets a catch-up frame
        (the latest snapshot) first. Terminates after the final frame."""
        cursor = from_tick
        if cursor is None:
            with self._cond:
                if self._snapshots:
                    latest = self._snapshots[-1]
                    yield latest
                    if latest.get("final"):
                        return
                    cursor = latest["tick"]
                else:
                    cursor = -1
        while True:
            with self._cond:
                while True:
                    fresh = [s for s in self._snapshots if s["tick"] > cursor]
                    if fresh:
                        break
                    if self.state in (RunState.COMPLETED, RunState.FAILED):
                        return
                    self._cond.wait(timeout=5.0)
            for frame in fresh:
                yield frame
                cursor = frame["tick"]
                if frame.get("final"):
                    return

    def handle(self) -> dict:
        return {
            "run_id": self.run_id,
            "state": self.state.value,
            "seed": self.seed,
            "world": self.world.name,
            "cadence": self.cadence,
            "n_agents": len(self.sim.agents),
            "lever_history": [s.to_dict() for s in self.sim._lever_history],
            "error": self.error,
        }


class RunManager:
    def __init__(self, config: GatewayConfig):
        self.config = config
        self._runs: dict[str, ManagedRun] = {}
        self._lock = threading.Lock()
        self._request_cache: dict[str, str] = {}  # request_id -> run_id

    def create(
        self,
        world_ref: str,
        seed: int,
        levers: Mapping[str, float] | None = None,
        cadence: int | None = None,
        n_agents: int | None = None,
        request_id: str | None = None,
    ) -> ManagedRun:
        with self._lock:
            if request_id is not None and request_id in self._request_cache:
                return self._runs[self._request_cache[request_id]]
            world = load_world_by_ref(world_ref, self.config)
            lever_obj = PolicyLevers().merged(levers) if levers else None
            run_id = uuid.uuid4().hex[:12]
            run = ManagedRun(
                run_id,
                world,
                seed,
                lever_obj,
                cadence or self.config.snapshot_cadence,
                tick_ms=self.config.tick_ms,
                n_agents=n_agents,
            )
            self._runs[run_id] = run
            if request_id is not None:
                self._request_cache[request_id] = run_id
            return run

    def get(self, run_id: str) -> ManagedRun:
        try:
            return self._runs[run_id]
        except KeyError:
            raise UnknownRun(run_id) from None

    def all_handles(self) -> list[dict]:
        return [run.handle() for run in self._runs.values()]

    def apply_levers(
        self,
        run_id: str,
        changes: Mapping[str, float],
        effective_tick: int | None = None,
        request_id: str | None = None,
    ) -> LeverSnapshot:
        run = self.get(run_id)
        if run.state not in (RunState.RUNNING, RunState.PAUSED):
            raise TransitionError(run_id, run.state, run.state)
        return run.sim.apply_levers(changes, effective_tick=effective_tick, request_id=request_id)
