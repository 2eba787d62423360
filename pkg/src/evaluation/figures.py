"""Grouped aggregates behind the high-risk trend and revenue-impact charts."""

from dataclasses import dataclass
from typing import Sequence

import pandas as pd

from src.models.records import AuditRecord, records_to_frame


@dataclass(frozen=True)
class FigureAggregates:
    """High-risk cases per (firm, year) and revenue impact per (firm, industry)."""

    high_risk_by_firm_year: pd.DataFrame
    revenue_by_firm_industry: pd.DataFrame


def _aggregate(frame: pd.DataFrame, keys: list[str], value: str) -> pd.DataFrame:
    grouped = frame.dropna(subset=[value]).groupby(keys, sort=True)[value]
    out = grouped.agg(total="sum", std=lambda s: s.std(ddof=0), count="count").reset_index()
    return out.rename(columns={"total": value})


def figure_aggregates(records: Sequence[AuditRecord]) -> FigureAggregates:
    """Sums and population standard deviations per group; groups without data are omitted."""
    frame = records_to_frame(records)
    frame["high_risk_cases"] = pd.to_numeric(frame["high_risk_cases"])
    frame["total_revenue_impact"] = pd.to_numeric(frame["total_revenue_impact"])
    return FigureAggregates(
        high_risk_by_firm_year=_aggregate(frame, ["firm_name", "year"], "high_risk_cases"),
        revenue_by_firm_industry=_aggregate(
            frame, ["firm_name", "industry_affected"], "total_revenue_impact"
        ),
    )
