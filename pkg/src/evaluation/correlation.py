"""Pearson correlations over record columns, including the derived risk percentage."""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.data.labels import risk_percentage
from src.models.records import NUMERIC_FIELDS, AuditRecord, records_to_frame
from src.models.reports import CorrelationMatrix

DERIVED_COLUMNS = ("risk_percentage",)


def pearson(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> Optional[float]:
    """Sample Pearson coefficient, or None when fewer than 2 rows or a column is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2 or len(x) != len(y):
        return None
    dx, dy = x - x.mean(), y - y.mean()
    denom = np.sqrt((dx * dx).sum() * (dy * dy).sum())
    if denom == 0 or not np.isfinite(denom):
        return None
    return float(np.clip((dx * dy).sum() / denom, -1.0, 1.0))


def correlation_frame(
    records: Sequence[AuditRecord], include_derived: Sequence[str] = DERIVED_COLUMNS
) -> pd.DataFrame:
    """Numeric record columns (plus derived ones) as floats, missing values as NaN."""
    frame = records_to_frame(records)[list(NUMERIC_FIELDS)].astype(np.float64)
    if "risk_percentage" in include_derived:
        frame["risk_percentage"] = [
            np.nan if (p := risk_percentage(r)) is None else p for r in records
        ]
    return frame


def pearson_matrix(
    data: Sequence[AuditRecord] | pd.DataFrame,
    include_derived: Sequence[str] = DERIVED_COLUMNS,
) -> CorrelationMatrix:
    """Symmetric Pearson matrix; each pair uses the rows where both values are present."""
    frame = data if isinstance(data, pd.DataFrame) else correlation_frame(data, include_derived)
    names = list(frame.columns)
    values = frame.to_numpy(dtype=np.float64)
    matrix: list[list[Optional[float]]] = [[None] * len(names) for _ in names]
    for i in range(len(names)):
        for j in range(i, len(names)):
            present = ~(np.isnan(values[:, i]) | np.isnan(values[:, j]))
            r = pearson(values[present, i], values[present, j])
            if i == j and r is not None:
                r = 1.0
            matrix[i][j] = matrix[j][i] = r
    return CorrelationMatrix(names=names, values=matrix)
