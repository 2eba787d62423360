"""Categorical, boolean, ordinal and binned encoding into numeric columns."""

import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import EncodingError
from src.models.records import AuditRecord, records_to_frame

logger = logging.getLogger(__name__)

OTHER = "<other>"

DEFAULT_NUMERIC = [
    "total_audit_engagements",
    "compliance_violations",
    "fraud_cases_detected",
    "total_revenue_impact",
    "employee_workload",
    "market_value",
    "historical_violation_ratio",
    "audit_frequency_change",
    "fraud_rate",
]


def split_list(value):
    """Accept comma-separated strings wherever a list is expected."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class EncodingPlan(BaseModel):
    """Which fields become which numeric columns.

    Column order: numeric, boolean, ordinal, binned (in mapping order), then one
    one-hot block per field with categories in lexicographic order and the
    ``<other>`` column last for open-vocabulary fields.
    """

    model_config = ConfigDict(extra="forbid")

    numeric: list[str] = Field(default_factory=lambda: list(DEFAULT_NUMERIC))
    boolean: list[str] = Field(default_factory=lambda: ["ai_used_for_auditing"])
    ordinal: dict[str, list[str]] = Field(default_factory=dict)
    bins: dict[str, list[float]] = Field(default_factory=dict)
    quantile_bins: dict[str, int] = Field(default_factory=dict)
    one_hot: list[str] = Field(
        default_factory=lambda: ["firm_name", "industry_affected", "region", "financial_status"]
    )
    open_vocabulary: list[str] = Field(default_factory=lambda: ["region", "financial_status"])
    categories: dict[str, list[str]] = Field(
        default_factory=dict, description="Resolved one-hot levels; learned when absent"
    )

    _split = field_validator("numeric", "boolean", "one_hot", "open_vocabulary", mode="before")(
        split_list
    )

    @field_validator("ordinal", "categories", mode="before")
    @classmethod
    def _split_levels(cls, value):
        if isinstance(value, dict):
            return {k: split_list(v) for k, v in value.items()}
        return value

    @field_validator("bins", mode="before")
    @classmethod
    def _split_edges(cls, value):
        if isinstance(value, dict):
            return {
                k: [float(e) for e in split_list(v)] if isinstance(v, str) else v
                for k, v in value.items()
            }
        return value

    @field_validator("bins")
    @classmethod
    def _edges_increasing(cls, value: dict[str, list[float]]) -> dict[str, list[float]]:
        for name, edges in value.items():
            if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError(f"bin edges for {name} must be strictly increasing: {edges}")
        return value

    @field_validator("quantile_bins")
    @classmethod
    def _positive_quantiles(cls, value: dict[str, int]) -> dict[str, int]:
        for name, count in value.items():
            if count < 2:
                raise ValueError(f"quantile bin count for {name} must be >= 2")
        return value

    @model_validator(mode="after")
    def _open_vocabulary_subset(self) -> "EncodingPlan":
        unknown = [f for f in self.open_vocabulary if f not in self.one_hot]
        if unknown:
            raise ValueError(f"open_vocabulary fields not one-hot encoded: {unknown}")
        return self

    def output_names(self) -> list[str]:
        """Column names produced by a resolved plan."""
        names = [*self.numeric, *self.boolean, *self.ordinal, *self.bins, *self.quantile_bins]
        for name in self.one_hot:
            levels = self.categories.get(name, [])
            names.extend(f"{name}={level}" for level in levels)
            if name in self.open_vocabulary:
                names.append(f"{name}={OTHER}")
        return names


@dataclass(frozen=True)
class EncodedRows:
    """Encoded feature matrix plus the plan resolved against the fitting data."""

    matrix: np.ndarray
    feature_names: tuple[str, ...]
    plan: EncodingPlan


def _column(frame: pd.DataFrame, name: str) -> pd.Series:
    if name not in frame.columns:
        raise EncodingError(f"unknown field in encoding plan: {name}", column=name)
    return frame[name]


def _numeric(series: pd.Series) -> np.ndarray:
    return pd.to_numeric(series, errors="coerce").to_numpy(dtype=np.float64)


def bin_index(values: np.ndarray, edges: Sequence[float]) -> np.ndarray:
    """Left-inclusive bin index per value; values outside the edges go to the end bins."""
    edges_arr = np.asarray(edges, dtype=np.float64)
    if np.any(np.diff(edges_arr) <= 0):
        raise EncodingError(f"bin edges must be strictly increasing: {list(edges)}")
    index = np.searchsorted(edges_arr, values, side="right") - 1
    top = len(edges_arr) - 2 if np.isinf(edges_arr[-1]) else len(edges_arr) - 1
    index = np.clip(index, 0, max(top, 0)).astype(np.float64)
    index[np.isnan(values)] = np.nan
    return index


def encode(rows: Union[Sequence[AuditRecord], pd.DataFrame], plan: EncodingPlan) -> EncodedRows:
    """Encode records (or a record frame with derived columns) into numeric rows.

    Args:
        rows: audit records, or a frame holding record fields plus derived features
        plan: encoding plan; one-hot categories and quantile edges are learned from
            ``rows`` unless the plan already carries them

    Returns:
        Encoded matrix, column names and the resolved plan for replaying on new rows

    Raises:
        EncodingError: unknown field, unseen category without an ``<other>`` column,
            or unknown ordinal level
    """
    frame = rows if isinstance(rows, pd.DataFrame) else records_to_frame(rows)
    columns: list[np.ndarray] = []

    for name in plan.numeric:
        columns.append(_numeric(_column(frame, name)))

    for name in plan.boolean:
        series = _column(frame, name)
        columns.append(
            np.array([np.nan if v is None or v != v else float(bool(v)) for v in series])
        )

    for name, levels in plan.ordinal.items():
        position = {level: float(i) for i, level in enumerate(levels)}
        values = []
        for row, value in enumerate(_column(frame, name)):
            if value is None or value != value:
                values.append(np.nan)
            elif value not in position:
                raise EncodingError(f"unknown ordinal level {value!r}", row=row, column=name)
            else:
                values.append(position[value])
        columns.append(np.array(values, dtype=np.float64))

    resolved_bins = dict(plan.bins)
    for name, edges in plan.bins.items():
        columns.append(bin_index(_numeric(_column(frame, name)), edges))
    for name, count in plan.quantile_bins.items():
        values = _numeric(_column(frame, name))
        present = values[~np.isnan(values)]
        if present.size == 0:
            raise EncodingError("cannot derive quantile bins from an empty column", column=name)
        edges = np.unique(
            np.quantile(present, [i / count for i in range(count)], method="midpoint")
        )
        edges = np.append(edges, np.inf) if edges.size < 2 else edges
        resolved_bins[name] = [float(e) for e in edges]
        columns.append(bin_index(values, resolved_bins[name]))

    categories = dict(plan.categories)
    for name in plan.one_hot:
        series = _column(frame, name)
        if name not in categories:
            categories[name] = sorted({str(v) for v in series if v is not None and v == v})
        levels = categories[name]
        is_open = name in plan.open_vocabulary
        block = np.zeros((len(series), len(levels) + int(is_open)), dtype=np.float64)
        position = {level: i for i, level in enumerate(levels)}
        for row, value in enumerate(series):
            if value is None or value != value:
                block[row, :] = np.nan
            elif str(value) in position:
                block[row, position[str(value)]] = 1.0
            elif is_open:
                block[row, -1] = 1.0
            else:
                raise EncodingError(
                    f"unseen category {value!r} and no {OTHER} column", row=row, column=name
                )
        columns.extend(block.T)

    resolved = plan.model_copy(
        update={
            "bins": {**plan.bins, **{k: resolved_bins[k] for k in plan.quantile_bins}},
            "quantile_bins": {},
            "categories": categories,
        }
    )
    names = resolved.output_names()
    matrix = np.column_stack(columns) if columns else np.zeros((len(frame), 0))
    logger.debug(f"Encoded {matrix.shape[0]} rows into {matrix.shape[1]} columns")
    return EncodedRows(matrix=matrix, feature_names=tuple(names), plan=resolved)
