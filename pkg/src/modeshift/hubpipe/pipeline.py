"""Acquisition, storage, and processing stages of the hub pipeline.

Each stage is a single consumer of an ordered stream; storage is a bounded
append-only log whose replay reproduces processing output exactly (the
aggregates are a pure fold over the committed prefix).
"""

from __future__ import annotations

import csv
import hashlib
import hmac
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .records import (
    PAYLOAD_CATEGORIES,
    FieldCategory,
    Rejection,
    RejectionReason,
    Source,
    TelemetryRecord,
    ValidatedRecord,
)


class StorageFull(RuntimeError):
    pass


class EmptyWindow(ValueError):
    pass


def device_token(device_id: str, key: bytes) -> str:
    """Stable keyed pseudonym for a device id."""
    return hmac.new(key, device_id.encode("utf-8"), hashlib.sha256).hexdigest()[:20]


class AcquisitionStage:
    """Validates, consent-filters, tokenizes, and zone-snaps raw telemetry.

    Consent semantics: a denied field category drops those fields; the
    record is only rejected when nothing consented remains. Timestamps
    must be monotone per device stream.
    """

    def __init__(self, key: bytes, zone_resolver: Callable[[float, float], str] | None = None):
        if not key:
            raise ValueError("acquisition key must be configured")
        self._key = key
        self._zone_resolver = zone_resolver or (lambda lat, lon: f"zone_{int(lat * 10)}_{int(lon * 10)}")
        self._last_ts: dict[str, float] = {}

    def acquire(self, record: TelemetryRecord) -> ValidatedRecord | Rejection:
        if record.device_id is None:
            return Rejection(RejectionReason.MISSING_FIELD, "device_id")
        if record.timestamp is None:
            return Rejection(RejectionReason.MISSING_FIELD, "timestamp")
        if record.source is None:
            return Rejection(RejectionReason.MISSING_FIELD, "source")

        last = self._last_ts.get(record.device_id)
        if last is not None and record.timestamp < last:
            return Rejection(
                RejectionReason.TIMESTAMP_REGRESSION,
                f"{record.timestamp} < {last}",
            )

        enforce_consent = record.source is Source.RIDER_APP
        dropped = []
        payload = {}
        for name, value in record.payload.items():
            category = PAYLOAD_CATEGORIES.get(name, FieldCategory.MEDIA)
            if enforce_consent and not record.consent.get(category.value, False):
                dropped.append(name)
            else:
                payload[name] = value

        gps = record.gps
        if enforce_consent and gps is not None and not record.consent.get(FieldCategory.LOCATION.value, False):
            dropped.append("gps")
            gps = None

        if not payload and gps is None:
            return Rejection(RejectionReason.ALL_FIELDS_DENIED, ",".join(sorted(dropped)))

        self._last_ts[record.device_id] = record.timestamp
        zone = self._zone_resolver(gps[0], gps[1]) if gps is not None else None
        return ValidatedRecord(
            source=record.source,
            device_token=device_token(record.device_id, self._key),
            timestamp=record.timestamp,
            zone_id=zone,
            payload=payload,
            dropped_fields=tuple(sorted(dropped)),
            gps_operator_scope=gps,
        )


class StorageLog:
    """Bounded append-only log with monotonically increasing offsets."""

    def __init__(self, capacity: int = 1_000_000):
        self.capacity = capacity
        self._records: list[ValidatedRecord] = []

    def append(self, record: ValidatedRecord) -> int:
        if len(self._records) >= self.capacity:
            raise StorageFull(f"log at capacity {self.capacity}")
        self._records.append(record)
        return len(self._records) - 1

    def __len__(self) -> int:
        return len(self._records)

    def replay(self, from_offset: int = 0) -> Iterable[ValidatedRecord]:
        return iter(self._records[from_offset:])

    def window(self, t0: float, t1: float) -> list[ValidatedRecord]:
        return [r for r in self._records if t0 <= r.timestamp < t1]


def process_window(records: Iterable[ValidatedRecord], t0: float, t1: float) -> dict:
    """Aggregate one batch window: dedup count, charger utilization,
    occupancy by hub and hour.

    Exact duplicates (same token, timestamp, payload) count once. Charger
    utilization treats each charger-port record as a one-minute port
    sample with occupancy 0/1.
    """
    batch = [r for r in records if t0 <= r.timestamp < t1]
    if not batch:
        raise EmptyWindow(f"no records in [{t0}, {t1})")

    seen = set()
    deduped = []
    for r in batch:
        key = r.dedup_key()
        if key not in seen:
            seen.add(key)
            deduped.append(r)

    port_samples = 0
    occupied_samples = 0
    occupancy_cells: dict[tuple[str, int], list[float]] = {}
    for r in deduped:
        occ = r.payload.get("occupancy")
        if r.source is Source.CHARGER_PORT and occ is not None:
            port_samples += 1
            occupied_samples += 1 if occ else 0
        hub = r.payload.get("hub_id")
        if hub is not None and occ is not None:
            hour = int(r.timestamp // 60) % 24
            occupancy_cells.setdefault((str(hub), hour), []).append(float(occ))

    return {
        "window": [t0, t1],
        "record_count": len(batch),
        "deduplicated_count": len(deduped),
        "charger_utilization": (occupied_samples / port_samples) if port_samples else 0.0,
        "occupancy_by_hub_hour": {
            f"{hub}|{hour:02d}": sum(vals) / len(vals)
            for (hub, hour), vals in sorted(occupancy_cells.items())
        },
    }


@dataclass
class HubPipeline:
    """End-to-end wiring with reconciliation counters.

    Every input record lands in exactly one of stored / rejected, so
    input_count == stored_count + len(rejections) always holds.
    """

    acquisition: AcquisitionStage
    storage: StorageLog = field(default_factory=StorageLog)
    input_count: int = 0
    rejections: list[tuple[int, Rejection]] = field(default_factory=list)

    def ingest(self, record: TelemetryRecord) -> int | Rejection:
        """Returns the storage offset, or the rejection."""
        self.input_count += 1
        outcome = self.acquisition.acquire(record)
        if isinstance(outcome, Rejection):
            self.rejections.append((self.input_count - 1, outcome))
            return outcome
        return self.storage.append(outcome)

    @property
    def stored_count(self) -> int:
        return len(self.storage)

    def reconciles(self) -> bool:
        return self.input_count == self.stored_count + len(self.rejections)

    def process(self, t0: float, t1: float) -> dict:
        return process_window(self.storage.replay(), t0, t1)

    def write_rejection_log(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["offset", "reason", "detail"])
            for offset, rejection in self.rejections:
                writer.writerow([offset, rejection.reason.value, rejection.detail])
