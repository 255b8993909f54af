"""FIFO multi-server queue for charger ports, in continuous time.

Arrivals must be fed in nondecreasing time order; each of the c servers is
tracked by the time it next frees up, which yields the exact FIFO G/G/c
waiting-time recursion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field


class ServicePool:
    def __init__(self, servers: int, start_time: float = 0.0):
        if servers < 0:
            raise ValueError("servers must be >= 0")
        self._free_at = [start_time] * servers
        heapq.heapify(self._free_at)
        self.waits: list[float] = []
        self.started = 0
        self.completed_by: list[float] = []  # session end times
        self.busy_minutes = 0.0
        self._last_arrival = start_time

    @property
    def servers(self) -> int:
        return len(self._free_at)

    def add_servers(self, n: int, now: float) -> None:
        for _ in range(n):
            heapq.heappush(self._free_at, now)

    def arrive(self, t: float, service_min: float) -> tuple[float, float]:
        """Join the queue at ``t``; returns (start_time, wait)."""
        if t < self._last_arrival - 1e-9:
            raise ValueError("arrivals must be time-ordered")
        self._last_arrival = t
        if not self._free_at:
            raise ValueError("no servers configured")
        free = heapq.heappop(self._free_at)
        start = free if free > t else t
        heapq.heappush(self._free_at, start + service_min)
        wait = start - t
        self.waits.append(wait)
        self.started += 1
        self.completed_by.append(start + service_min)
        self.busy_minutes += service_min
        return start, wait

    def completed(self, horizon: float) -> int:
        return sum(1 for end in self.completed_by if end <= horizon)

    def in_progress(self, horizon: float) -> int:
        return self.started - self.completed(horizon)

    def mean_wait(self) -> float:
        return sum(self.waits) / len(self.waits) if self.waits else 0.0

    def max_wait(self) -> float:
        return max(self.waits) if self.waits else 0.0


@dataclass
class ChargerQueueState:
    """Per-hub charger queue with tick-step bookkeeping."""

    ports: int
    now: float = 0.0
    pool: ServicePool = field(default_factory=lambda: ServicePool(0))
    sessions: list[tuple[float, float, float]] = field(default_factory=list)  # (arrive, start, end)

    def __post_init__(self) -> None:
        if self.pool.servers == 0 and self.ports > 0:
            self.pool = ServicePool(self.ports, start_time=self.now)

    def arrive(self, t: float, service_min: float) -> float:
        start, wait = self.pool.arrive(t, service_min)
        self.sessions.append((t, start, start + service_min))
        return wait

    def add_ports(self, n: int, now: float) -> None:
        self.ports += n
        self.pool.add_servers(n, now)

    def occupied_port_minutes(self, t0: float, t1: float) -> float:
        total = 0.0
        for _, start, end in self.sessions:
            lo = start if start > t0 else t0
            hi = end if end < t1 else t1
            if hi > lo:
                total += hi - lo
        return total

    def utilization(self, t0: float, t1: float) -> float:
        if self.ports == 0 or t1 <= t0:
            return 0.0
        return self.occupied_port_minutes(t0, t1) / (self.ports * (t1 - t0))

    def queue_length_integral(self, t0: float, t1: float) -> float:
        """Time integral of the number waiting, for Little's-law checks."""
        events: list[tuple[float, int]] = []
        for arrive, start, _ in self.sessions:
            if start > arrive:
                events.append((max(arrive, t0), 1))
                events.append((min(start, t1), -1))
        events.sort()
        integral = 0.0
        level = 0
        prev = t0
        for t, delta in events:
            if t > prev:
                integral += level * (t - prev)
                prev = t
            level += delta
        return integral


def charger_queue_step(
    state: ChargerQueueState,
    arrivals: list[tuple[float, float]],
    tick_minutes: float,
) -> dict:
    """Advance one tick, admitting (arrival_offset, service_min) pairs.

    Offsets are relative to the tick start; arrivals are served FIFO in
    time order. Returns the wait stats for this tick's arrivals.
    """
    t0 = state.now
    waits = []
    for offset, service in sorted(arrivals):
        waits.append(state.arrive(t0 + offset, service))
    state.now = t0 + tick_minutes
    return {
        "arrivals": len(arrivals),
        "waits": waits,
        "mean_wait": sum(waits) / len(waits) if waits else 0.0,
        "max_wait": max(waits) if waits else 0.0,
        "in_progress": state.pool.in_progress(state.now),
    }
