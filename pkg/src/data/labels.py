"""High-risk label derivation."""

from typing import Optional, Sequence

import numpy as np

from src.errors import LabelingError
from src.models.records import AuditRecord, LabelSpec


def risk_percentage(record: AuditRecord) -> Optional[float]:
    """high_risk_cases / total_audit_engagements, or None when undefined."""
    total, high = record.total_audit_engagements, record.high_risk_cases
    if total is None or high is None or total == 0:
        return None
    return high / total


def derive_labels(records: Sequence[AuditRecord], spec: LabelSpec) -> np.ndarray:
    """Label 1 iff the risk percentage is at or above ``spec.tau``.

    Raises:
        LabelingError: engagements missing or zero, or high-risk count missing
    """
    labels = np.zeros(len(records), dtype=np.int64)
    for i, record in enumerate(records):
        if not record.total_audit_engagements:
            raise LabelingError("total_audit_engagements missing or zero", row=i)
        if record.high_risk_cases is None:
            raise LabelingError("high_risk_cases missing", row=i)
        labels[i] = int(record.high_risk_cases / record.total_audit_engagements >= spec.tau)
    return labels
