"""Telemetry record types moving through the hub pipeline.

Raw device ids exist only on TelemetryRecord; acquisition replaces them
with a keyed-hash token and snaps GPS to a zone id. Media payloads are
opaque references, never decoded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class Source(str, Enum):
    BUS_FLEET = "BusFleet"
    CHARGER_PORT = "ChargerPort"
    RIDER_APP = "RiderApp"
    PARKING_SENSOR = "ParkingSensor"


class FieldCategory(str, Enum):
    LOCATION = "location"
    OCCUPANCY = "occupancy"
    ENERGY = "energy"
    MEDIA = "media"


#: Which consent category covers each payload field.
PAYLOAD_CATEGORIES: dict[str, FieldCategory] = {
    "occupancy": FieldCategory.OCCUPANCY,
    "kwh": FieldCategory.ENERGY,
    "image_ref": FieldCategory.MEDIA,
    "hub_id": FieldCategory.OCCUPANCY,
}


class RejectionReason(str, Enum):
    MISSING_FIELD = "MissingField"
    TIMESTAMP_REGRESSION = "TimestampRegression"
    ALL_FIELDS_DENIED = "AllFieldsDenied"


@dataclass(frozen=True)
class Rejection:
    reason: RejectionReason
    detail: str = ""


@dataclass(frozen=True)
class TelemetryRecord:
    source: Source
    device_id: str | None
    timestamp: float | None
    gps: tuple[float, float] | None = None
    payload: Mapping[str, object] = field(default_factory=dict)
    consent: Mapping[str, bool] = field(default_factory=dict)

    @classmethod
    def from_json_line(cls, line: str) -> "TelemetryRecord":
        raw = json.loads(line)
        gps = raw.get("gps")
        return cls(
            source=Source(raw["source"]),
            device_id=raw.get("device_id"),
            timestamp=raw.get("timestamp"),
            gps=tuple(gps) if gps else None,
            payload=raw.get("payload", {}),
            consent=raw.get("consent", {}),
        )


@dataclass(frozen=True)
class ValidatedRecord:
    """Post-acquisition record: tokenized, consent-filtered, zone-snapped.

    ``gps_operator_scope`` retains the precise fix for Operator views only;
    serialization for other principals must go through access.record_view.
    """

    source: Source
    device_token: str
    timestamp: float
    zone_id: str | None
    payload: Mapping[str, object]
    dropped_fields: tuple[str, ...] = ()
    gps_operator_scope: tuple[float, float] | None = None

    def dedup_key(self) -> tuple:
        return (self.device_token, self.timestamp, tuple(sorted(self.payload.items())))
