"""Role-based field access with deny-by-default and an audit trail.

Analysts never receive location finer than zone granularity, whatever the
policy table says; every decision is appended to the audit log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from .records import ValidatedRecord

ZONE_LOCATION = "location_zone"
PRECISE_LOCATION = "location_precise"
FIELD_CATEGORIES = ("occupancy", "energy", "media", ZONE_LOCATION, PRECISE_LOCATION)


class Principal(str, Enum):
    RIDER = "Rider"
    OPERATOR = "Operator"
    ANALYST = "Analyst"


@dataclass(frozen=True)
class AccessDecision:
    allowed: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.allowed


@dataclass
class AccessPolicyTable:
    """Permitted field categories per role; anything unlisted is denied."""

    permitted: Mapping[str, frozenset[str]] = field(
        default_factory=lambda: {
            Principal.RIDER.value: frozenset({"occupancy", ZONE_LOCATION}),
            Principal.OPERATOR.value: frozenset(FIELD_CATEGORIES),
            Principal.ANALYST.value: frozenset({"occupancy", "energy", ZONE_LOCATION}),
        }
    )
    audit: list[dict] = field(default_factory=list)

    def write_audit_log(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for entry in self.audit:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")


def authorize(
    table: AccessPolicyTable,
    principal: str | Principal,
    field_category: str,
    record_scope: str = "*",
) -> AccessDecision:
    """Deny-by-default check, audited."""
    name = principal.value if isinstance(principal, Principal) else str(principal)
    if name not in table.permitted:
        decision = AccessDecision(False, "UnknownPrincipal")
    elif name == Principal.ANALYST.value and field_category == PRECISE_LOCATION:
        decision = AccessDecision(False, "GranularityPolicy")
    elif field_category in table.permitted[name]:
        decision = AccessDecision(True, "")
    else:
        decision = AccessDecision(False, "NotPermitted")
    table.audit.append(
        {
            "principal": name,
            "field_category": field_category,
            "scope": record_scope,
            "allowed": decision.allowed,
            "reason": decision.reason,
        }
    )
    return decision


_PAYLOAD_FIELD_CATEGORY = {"occupancy": "occupancy", "hub_id": "occupancy", "kwh": "energy", "image_ref": "media"}


def record_view(table: AccessPolicyTable, principal: str | Principal, record: ValidatedRecord) -> dict:
    """Serialize a stored record for one principal, enforcing the policy.

    Raw device ids never reach this layer; precise GPS appears only when
    the principal is authorized for it.
    """
    view: dict[str, object] = {
        "source": record.source.value,
        "device_token": record.device_token,
        "timestamp": record.timestamp,
    }
    if authorize(table, principal, ZONE_LOCATION, "record"):
        view["zone_id"] = record.zone_id
    if record.gps_operator_scope is not None and authorize(table, principal, PRECISE_LOCATION, "record"):
        view["gps"] = list(record.gps_operator_scope)
    for name, value in record.payload.items():
        category = _PAYLOAD_FIELD_CATEGORY.get(name, "media")
        if authorize(table, principal, category, "record"):
            view[name] = value
    return view
