"""Missing-value imputation and quantile outlier clipping."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import ImputationError
from src.models.records import (
    BOOLEAN_FIELDS,
    CATEGORICAL_FIELDS,
    COUNT_FIELDS,
    REAL_FIELDS,
    AuditRecord,
)
from src.preprocess.encoding import split_list

logger = logging.getLogger(__name__)

IMPUTED_NUMERIC = COUNT_FIELDS + REAL_FIELDS
IMPUTED_CATEGORICAL = CATEGORICAL_FIELDS + BOOLEAN_FIELDS


class ImputePolicy(BaseModel):
    """Imputation strategy per field kind."""

    model_config = ConfigDict(extra="forbid")

    numeric: Literal["median"] = "median"
    categorical: Literal["mode"] = "mode"


class ClipRule(BaseModel):
    """Per-field empirical quantile bounds."""

    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    q_low: float = Field(0.01, ge=0.0, le=1.0)
    q_high: float = Field(0.99, ge=0.0, le=1.0)
    fields: list[str] = Field(
        default_factory=lambda: [
            "total_audit_engagements",
            "compliance_violations",
            "fraud_cases_detected",
            "total_revenue_impact",
            "employee_workload",
            "market_value",
        ]
    )

    _split = field_validator("fields", mode="before")(split_list)

    @model_validator(mode="after")
    def _ordered(self) -> "ClipRule":
        if not self.q_low < self.q_high:
            raise ValueError(f"q_low ({self.q_low}) must be below q_high ({self.q_high})")
        unknown = [f for f in self.fields if f not in IMPUTED_NUMERIC]
        if unknown:
            raise ValueError(f"clip fields must be numeric record fields: {unknown}")
        return self


@dataclass(frozen=True)
class ImputeResult:
    """Imputed records plus the statistics used and per-field fill counts."""

    records: list[AuditRecord]
    statistics: dict[str, Any]
    filled: dict[str, int]


@dataclass(frozen=True)
class ClipResult:
    """Clipped records plus bounds and per-field clip counts."""

    records: list[AuditRecord]
    bounds: dict[str, tuple[float, float]]
    clipped: dict[str, int] = field(default_factory=dict)


def _mode(values: Sequence[Any]) -> Any:
    counts = Counter(values)
    top = max(counts.values())
    # ties resolved by the smallest value in sort order
    return sorted((v for v, c in counts.items() if c == top), key=lambda v: (str(type(v)), v))[0]


def fit_imputation(records: Sequence[AuditRecord], policy: ImputePolicy) -> dict[str, Any]:
    """Median / mode statistics for every field that has missing values in ``records``.

    Raises:
        ImputationError: a field with missing values has no observed value at all
    """
    statistics: dict[str, Any] = {}
    for name in IMPUTED_NUMERIC + IMPUTED_CATEGORICAL:
        present = [getattr(r, name) for r in records if getattr(r, name) is not None]
        if not present:
            if records:
                raise ImputationError("column is entirely missing", column=name)
            continue
        if name in IMPUTED_NUMERIC:
            value = float(np.median(np.asarray(present, dtype=np.float64)))
            statistics[name] = int(round(value)) if name in COUNT_FIELDS else value
        else:
            statistics[name] = _mode(present)
    return statistics


def apply_imputation(
    records: Sequence[AuditRecord], statistics: dict[str, Any]
) -> tuple[list[AuditRecord], dict[str, int]]:
    """Fill missing markers from precomputed statistics."""
    filled: dict[str, int] = {}
    output = []
    for i, record in enumerate(records):
        missing = record.missing_fields()
        if not missing:
            output.append(record)
            continue
        update = {}
        for name in missing:
            if name not in statistics:
                raise ImputationError("no imputation statistic for field", row=i, column=name)
            update[name] = statistics[name]
            filled[name] = filled.get(name, 0) + 1
        values = {**record.model_dump(), **update}
        if values["high_risk_cases"] > values["total_audit_engagements"]:
            values["high_risk_cases"] = values["total_audit_engagements"]
        output.append(AuditRecord(**values))
    return output, filled


def impute(records: Sequence[AuditRecord], policy: Optional[ImputePolicy] = None) -> ImputeResult:
    """Replace missing markers with the median (numeric) or mode (categorical).

    Statistics come from ``records`` only. An imputed high-risk count above the
    engagement count is lowered to keep the record consistent.
    """
    policy = policy or ImputePolicy()
    needed = {name for r in records for name in r.missing_fields()}
    statistics = {
        k: v for k, v in fit_imputation(records, policy).items() if k in needed
    } if needed else {}
    output, filled = apply_imputation(records, statistics)
    for name, count in sorted(filled.items()):
        logger.info(f"Imputed {count} missing {name} values with {statistics[name]!r}")
    return ImputeResult(records=output, statistics=statistics, filled=filled)


def fit_clip_bounds(
    records: Sequence[AuditRecord], rule: ClipRule
) -> dict[str, tuple[float, float]]:
    """Midpoint-interpolated empirical quantile bounds per clipped field."""
    bounds = {}
    for name in rule.fields:
        values = np.asarray(
            [getattr(r, name) for r in records if getattr(r, name) is not None], dtype=np.float64
        )
        if values.size == 0:
            continue
        low, high = np.quantile(values, [rule.q_low, rule.q_high], method="midpoint")
        if name in COUNT_FIELDS:
            low, high = math.ceil(low), math.floor(high)
        bounds[name] = (float(low), float(high))
    return bounds


def apply_clip_bounds(
    records: Sequence[AuditRecord], bounds: dict[str, tuple[float, float]]
) -> tuple[list[AuditRecord], dict[str, int]]:
    """Clamp each bounded field into its bounds."""
    clipped = {name: 0 for name in bounds}
    output = []
    for record in records:
        update = {}
        for name, (low, high) in bounds.items():
            value = getattr(record, name)
            if value is None or low <= value <= high:
                continue
            new = min(max(value, low), high)
            update[name] = int(new) if name in COUNT_FIELDS else float(new)
            clipped[name] += 1
        if update:
            values = {**record.model_dump(), **update}
            total, high_risk = values["total_audit_engagements"], values["high_risk_cases"]
            if total is not None and high_risk is not None and high_risk > total:
                values["high_risk_cases"] = total
            record = AuditRecord(**values)
        output.append(record)
    return output, clipped


def clip_outliers(records: Sequence[AuditRecord], rule: Optional[ClipRule] = None) -> ClipResult:
    """Clamp numeric fields to their empirical [q_low, q_high] quantiles.

    Count fields use integer bounds (ceil of the low quantile, floor of the high
    one). Constant fields are never changed.
    """
    rule = rule or ClipRule()
    if not rule.enabled:
        return ClipResult(records=list(records), bounds={}, clipped={})
    bounds = fit_clip_bounds(records, rule)
    output, clipped = apply_clip_bounds(records, bounds)
    for name, count in clipped.items():
        if count:
            logger.info(f"Clipped {count} {name} values into {bounds[name]}")
    return ClipResult(records=output, bounds=bounds, clipped=clipped)
