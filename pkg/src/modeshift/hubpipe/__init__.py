"""Smart-hub telemetry pipeline: collection, acquisition/validation with
privacy filtering, append-only storage, batch processing, incentives, and
role-based access control with an audit trail."""

from .records import (
    FieldCategory,
    Rejection,
    RejectionReason,
    Source,
    TelemetryRecord,
    ValidatedRecord,
)
from .pipeline import AcquisitionStage, EmptyWindow, HubPipeline, StorageFull, StorageLog, process_window
from .incentives import ConsentRevoked, IncentiveLedger, NotEnrolled
from .access import AccessDecision, AccessPolicyTable, Principal, authorize, record_view

__all__ = [
    "FieldCategory",
    "Rejection",
    "RejectionReason",
    "Source",
    "TelemetryRecord",
    "ValidatedRecord",
    "AcquisitionStage",
    "EmptyWindow",
    "HubPipeline",
    "StorageFull",
    "StorageLog",
    "process_window",
    "ConsentRevoked",
    "IncentiveLedger",
    "NotEnrolled",
    "AccessDecision",
    "AccessPolicyTable",
    "Principal",
    "authorize",
    "record_view",
]
