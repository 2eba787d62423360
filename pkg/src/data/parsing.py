"""CSV ingestion and serialization of audit records."""

import io
import logging
import math
from typing import Any, Iterable, Optional

import pandas as pd
from pydantic import ValidationError

from src.errors import ConsistencyError, DataError, SchemaError
from src.models.records import (
    BOOLEAN_FIELDS,
    COUNT_FIELDS,
    CSV_COLUMNS,
    FIELD_NAMES,
    REAL_FIELDS,
    AuditRecord,
    records_to_frame,
)

logger = logging.getLogger(__name__)

_TRUE = {"yes": True, "no": False}
_COLUMN_FOR_FIELD = dict(zip(FIELD_NAMES, CSV_COLUMNS))


def normalize_header(name: str) -> str:
    """Case-insensitive header key with underscores for spaces."""
    return "_".join(name.strip().lower().split())


def _parse_count(cell: str, row: int, field: str) -> Optional[int]:
    if cell == "":
        return None
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"not a number: {cell!r}", row=row, column=_COLUMN_FOR_FIELD[field])
    if not math.isfinite(value) or value != int(value):
        raise DataError(f"not an integer count: {cell!r}", row=row, column=_COLUMN_FOR_FIELD[field])
    return int(value)


def _parse_real(cell: str, row: int, field: str) -> Optional[float]:
    if cell == "":
        return None
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"not a number: {cell!r}", row=row, column=_COLUMN_FOR_FIELD[field])
    if not math.isfinite(value):
        raise DataError(f"non-finite value: {cell!r}", row=row, column=_COLUMN_FOR_FIELD[field])
    return value


def _parse_bool(cell: str, row: int, field: str) -> Optional[bool]:
    if cell == "":
        return None
    try:
        return _TRUE[cell.lower()]
    except KeyError:
        raise DataError(f"expected Yes/No, got {cell!r}", row=row, column=_COLUMN_FOR_FIELD[field])


def _convert_row(raw: dict[str, str], row: int) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for field in FIELD_NAMES:
        cell = raw[field].strip() if isinstance(raw[field], str) else ""
        if field == "year":
            year = _parse_count(cell, row, field)
            if year is None:
                raise DataError("year is required", row=row, column="Year")
            values[field] = year
        elif field in COUNT_FIELDS:
            values[field] = _parse_count(cell, row, field)
        elif field in REAL_FIELDS:
            values[field] = _parse_real(cell, row, field)
        elif field in BOOLEAN_FIELDS:
            values[field] = _parse_bool(cell, row, field)
        else:
            values[field] = cell or None
    return values


def parse_records(csv_text: str) -> list[AuditRecord]:
    """Parse audit records from CSV text.

    Args:
        csv_text: UTF-8 CSV with a header row naming the audit-record columns

    Returns:
        One record per data row; empty cells become missing markers

    Raises:
        SchemaError: header does not match the record columns
        DataError: a cell cannot be parsed (row/column attached)
        ConsistencyError: high_risk_cases exceeds total_audit_engagements
    """
    try:
        frame = pd.read_csv(io.StringIO(csv_text), dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SchemaError("input has no header row")

    headers = [normalize_header(str(c)) for c in frame.columns]
    duplicated = sorted({h for h in headers if headers.count(h) > 1})
    missing = [c for c, f in zip(CSV_COLUMNS, FIELD_NAMES) if f not in headers]
    extra = [c for c, h in zip(frame.columns, headers) if h not in FIELD_NAMES]
    if missing or extra or duplicated:
        raise SchemaError(
            f"header mismatch: missing={missing} extra={extra} duplicated={duplicated}"
        )
    frame.columns = headers

    records = []
    for row, raw in enumerate(frame.to_dict("records")):
        values = _convert_row(raw, row)
        total, high = values["total_audit_engagements"], values["high_risk_cases"]
        if total is not None and high is not None and high > total:
            raise ConsistencyError(
                f"High_Risk_Cases={high} exceeds Total_Audit_Engagements={total} (line {row + 2})",
                row=row,
            )
        try:
            records.append(AuditRecord(**values))
        except ValidationError as e:
            error = e.errors()[0]
            field = str(error["loc"][0]) if error["loc"] else None
            raise DataError(
                error["msg"], row=row, column=_COLUMN_FOR_FIELD.get(field or "", field)
            )
    logger.info(f"Parsed {len(records)} audit records")
    return records


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "Yes" if value else "No"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_records(records: Iterable[AuditRecord]) -> str:
    """Render records as CSV text that ``parse_records`` reads back unchanged."""
    rows = [[_format_cell(getattr(r, f)) for f in FIELD_NAMES] for r in records]
    frame = pd.DataFrame(rows, columns=list(CSV_COLUMNS), dtype=object)
    return frame.to_csv(index=False, lineterminator="\n")
