"""Audit-record ingestion, labeling and dataset assembly."""

from .parsing import normalize_header, parse_records, records_to_frame, serialize_records
from .labels import derive_labels, risk_percentage
from .builder import build_dataset

__all__ = [
    "normalize_header",
    "parse_records",
    "records_to_frame",
    "serialize_records",
    "derive_labels",
    "risk_percentage",
    "build_dataset",
]
