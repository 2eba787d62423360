"""Derived history features and sliding-window restructuring."""

import logging
from typing import Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.errors import WindowError
from src.models.dataset import Dataset
from src.models.records import AuditRecord, records_to_frame
from src.preprocess.encoding import EncodingPlan, encode, split_list

logger = logging.getLogger(__name__)

DERIVED_COLUMNS = ("historical_violation_ratio", "audit_frequency_change", "fraud_rate")

Rows = Union[Sequence[AuditRecord], pd.DataFrame]


class WindowSpec(BaseModel):
    """Sliding-window layout over consecutive years of one group."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    window_length: int = Field(3, ge=2, description="Years per sample (W)")
    stride: int = Field(1, ge=1)
    group_by: list[str] = Field(default_factory=lambda: ["firm_name"])

    _split = field_validator("group_by", mode="before")(split_list)


def group_keys(frame: pd.DataFrame, group_by: Sequence[str]) -> pd.Series:
    """One string key per row; composite keys are joined with ``|``."""
    missing = [name for name in group_by if name not in frame.columns]
    if missing:
        raise WindowError(f"unknown group_by fields: {missing}")
    keys = frame[list(group_by)].astype(str)
    return keys.agg("|".join, axis=1) if len(group_by) > 1 else keys.iloc[:, 0]


def _as_frame(rows: Rows) -> pd.DataFrame:
    if isinstance(rows, pd.DataFrame):
        return rows.reset_index(drop=True)
    return records_to_frame(rows)


def derive_features(
    rows: Rows,
    group_by: Sequence[str] = ("firm_name",),
    trend_fields: Sequence[str] = (),
) -> pd.DataFrame:
    """History features per row, computed from strictly earlier years of its group.

    Columns:
        historical_violation_ratio: cumulative violations / cumulative engagements
            over prior years (0 without history)
        audit_frequency_change: engagements minus the group's mean engagements in
            its most recent prior year (0 without history)
        fraud_rate: fraud cases / engagements of the row itself
        <field>_trend: same difference as audit_frequency_change for each
            configured numeric field

    Returns:
        Frame aligned with the input row order
    """
    frame = _as_frame(rows)
    keys = group_keys(frame, group_by)
    n = len(frame)
    out = {name: np.zeros(n) for name in DERIVED_COLUMNS}
    for name in trend_fields:
        if name not in frame.columns:
            raise WindowError(f"unknown trend field: {name}")
        out[f"{name}_trend"] = np.zeros(n)

    engagements = pd.to_numeric(frame["total_audit_engagements"]).to_numpy(dtype=np.float64)
    violations = pd.to_numeric(frame["compliance_violations"]).to_numpy(dtype=np.float64)
    fraud = pd.to_numeric(frame["fraud_cases_detected"]).to_numpy(dtype=np.float64)
    years = frame["year"].to_numpy(dtype=np.int64)
    trend_values = {
        name: pd.to_numeric(frame[name]).to_numpy(dtype=np.float64) for name in trend_fields
    }

    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(engagements > 0, fraud / engagements, 0.0)
    if np.any(engagements == 0):
        logger.warning("fraud_rate set to 0 for rows with zero engagements")
    out["fraud_rate"] = np.nan_to_num(rate, nan=0.0)

    for key, index in keys.groupby(keys, sort=True).groups.items():
        rows_idx = np.asarray(index)
        cum_violations = cum_engagements = 0.0
        previous_year = None
        for year in np.unique(years[rows_idx]):
            at_year = rows_idx[years[rows_idx] == year]
            if cum_engagements > 0:
                out["historical_violation_ratio"][at_year] = cum_violations / cum_engagements
            elif cum_violations > 0:
                logger.warning(
                    f"Group {key} year {year}: violations without engagements; ratio set to 0"
                )
            if previous_year is not None:
                out["audit_frequency_change"][at_year] = (
                    engagements[at_year] - np.nanmean(engagements[previous_year])
                )
                for name, values in trend_values.items():
                    out[f"{name}_trend"][at_year] = values[at_year] - np.nanmean(
                        values[previous_year]
                    )
            cum_violations += np.nansum(violations[at_year])
            cum_engagements += np.nansum(engagements[at_year])
            previous_year = at_year
    return pd.DataFrame(out, index=frame.index)


def window_count(length: int, window_length: int, stride: int) -> int:
    """Samples produced by a run of ``length`` consecutive years."""
    if length < window_length:
        return 0
    return (length - window_length) // stride + 1


def windowize(
    rows: Rows,
    spec: WindowSpec,
    labels: Sequence[int] | np.ndarray,
    plan: EncodingPlan,
) -> Dataset:
    """Restructure year-ordered group histories into sliding-window samples.

    Each sample holds the encoded current-year features followed by, for every
    lag l = 1..W-1 and every numeric plan field, the lagged value
    ``<field>_lag<l>`` and the year-over-year delta ``<field>_delta<l>`` (value at
    lag l-1 minus value at lag l). Gaps in a group's years split it into runs;
    runs shorter than W yield no samples and a warning. When no run is long
    enough the result has zero rows and ``metadata["no_samples"]`` set; training
    operations reject it.

    Raises:
        WindowError: a group has two rows for the same year
    """
    frame = _as_frame(rows)
    labels_arr = np.asarray(labels, dtype=np.int64)
    encoded = encode(frame, plan)
    numeric = frame[plan.numeric].apply(pd.to_numeric).to_numpy(dtype=np.float64)
    keys = group_keys(frame, spec.group_by)
    years = frame["year"].to_numpy(dtype=np.int64)
    W = spec.window_length

    lag_names = []
    for lag in range(1, W):
        lag_names += [f"{name}_lag{lag}" for name in plan.numeric]
        lag_names += [f"{name}_delta{lag}" for name in plan.numeric]

    samples, sample_labels, sample_keys, sample_rows = [], [], [], []
    short_runs = 0
    for key, index in keys.groupby(keys, sort=True).groups.items():
        order = np.asarray(index)[np.argsort(years[np.asarray(index)], kind="stable")]
        group_years = years[order]
        if np.any(np.diff(group_years) == 0):
            raise WindowError(f"group {key} has duplicate years")
        breaks = np.flatnonzero(np.diff(group_years) != 1) + 1
        for run in np.split(order, breaks):
            if len(run) < W:
                short_runs += 1
                logger.warning(f"Group {key}: run of {len(run)} years is shorter than W={W}")
                continue
            for end in range(W - 1, len(run), spec.stride):
                current = run[end]
                parts = [encoded.matrix[current]]
                for lag in range(1, W):
                    later, earlier = numeric[run[end - lag + 1]], numeric[run[end - lag]]
                    parts += [earlier, later - earlier]
                samples.append(np.concatenate(parts))
                sample_labels.append(labels_arr[current])
                sample_keys.append(str(key))
                sample_rows.append(current)

    names = encoded.feature_names + tuple(lag_names)
    if not samples:
        logger.warning(f"No window samples: all {short_runs} group runs are shorter than W={W}")
    return Dataset(
        features=np.vstack(samples) if samples else np.zeros((0, len(names))),
        feature_names=names,
        labels=np.asarray(sample_labels),
        group_keys=tuple(sample_keys),
        row_index=np.asarray(sample_rows),
        metadata={
            "encoding_plan": encoded.plan,
            "window": spec.model_dump(),
            "short_runs": short_runs,
            "no_samples": not samples,
        },
    )
