"""Gamified incentive ledger for hub charging and synced transit trips.

Point values and the sync window are configuration, not doctrine: defaults
are 10 points per hub charge session and a 5-point bonus when a transit
boarding follows a charge start at the same hub within 120 minutes
(inclusive).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


class NotEnrolled(KeyError):
    pass


class ConsentRevoked(PermissionError):
    pass


CHARGE_EVENT = "HubChargeSession"
SYNC_EVENT = "SyncedTransitTrip"


@dataclass(frozen=True)
class LedgerEvent:
    user_token: str
    event_type: str
    points: int
    timestamp: float
    hub_id: str


@dataclass
class IncentiveLedger:
    charge_points: int = 10
    sync_bonus: int = 5
    sync_window_min: float = 120.0
    _enrolled: dict[str, bool] = field(default_factory=dict)  # token -> consent
    _events: list[LedgerEvent] = field(default_factory=list)
    _last_charge: dict[tuple[str, str], float] = field(default_factory=dict)

    def enroll(self, user_token: str) -> None:
        self._enrolled[user_token] = True

    def revoke_consent(self, user_token: str) -> None:
        if user_token not in self._enrolled:
            raise NotEnrolled(user_token)
        self._enrolled[user_token] = False

    def _check(self, user_token: str) -> None:
        if user_token not in self._enrolled:
            raise NotEnrolled(user_token)
        if not self._enrolled[user_token]:
            raise ConsentRevoked(user_token)

    def award_points(self, user_token: str, event_type: str, timestamp: float, hub_id: str) -> int:
        """Append one event; returns the points awarded by it.

        A SyncedTransitTrip only earns its bonus when a charge started at
        the same hub within the sync window; otherwise it logs 0 points.
        """
        self._check(user_token)
        if event_type == CHARGE_EVENT:
            points = self.charge_points
            self._last_charge[(user_token, hub_id)] = timestamp
        elif event_type == SYNC_EVENT:
            last = self._last_charge.get((user_token, hub_id))
            synced = last is not None and 0 <= timestamp - last <= self.sync_window_min
            points = self.sync_bonus if synced else 0
        else:
            raise ValueError(f"unknown event type {event_type!r}")
        self._events.append(LedgerEvent(user_token, event_type, points, timestamp, hub_id))
        return points

    def balance(self, user_token: str) -> int:
        return sum(e.points for e in self._events if e.user_token == user_token)

    def events(self, user_token: str | None = None) -> Iterable[LedgerEvent]:
        if user_token is None:
            return tuple(self._events)
        return tuple(e for e in self._events if e.user_token == user_token)
