"""Check generated records against the correlation targets they were generated for."""

import logging
from typing import Sequence

import numpy as np

from src.data.labels import risk_percentage
from src.evaluation.correlation import pearson
from src.models.records import AuditRecord, LabelSpec
from src.models.reports import CorrelationCheck, GenerationReport
from src.synthgen.config import SynthConfig

logger = logging.getLogger(__name__)

TOLERANCE = 0.05
LOW_N = 1000


def _column(records: Sequence[AuditRecord], name: str) -> np.ndarray:
    if name == "risk_percentage":
        values = [risk_percentage(r) for r in records]
    else:
        values = [getattr(r, name) for r in records]
    return np.array([np.nan if v is None else float(v) for v in values])


def validate_generation(
    records: Sequence[AuditRecord], config: SynthConfig, tolerance: float = TOLERANCE
) -> GenerationReport:
    """Achieved vs. target Pearson correlation for every configured pair.

    Pairs are compared on rows where both values are present. A pair with an
    undefined correlation (zero variance) fails. Below ``LOW_N`` records the
    report is flagged ``low_n``: its pass/fail is advisory.
    """
    checks = []
    for (left, right), target in config.targets().items():
        x, y = _column(records, left), _column(records, right)
        present = ~(np.isnan(x) | np.isnan(y))
        achieved = pearson(x[present], y[present])
        deviation = None if achieved is None else abs(achieved - target)
        checks.append(
            CorrelationCheck(
                left=left,
                right=right,
                target=target,
                achieved=achieved,
                deviation=deviation,
                passed=deviation is not None and deviation <= tolerance,
            )
        )

    tau = LabelSpec().tau
    rates = [p for p in (risk_percentage(r) for r in records) if p is not None]
    positive_rate = float(np.mean(np.array(rates) >= tau)) if rates else None

    report = GenerationReport(
        n_records=len(records),
        tolerance=tolerance,
        checks=checks,
        positive_rate=positive_rate,
        low_n=len(records) < LOW_N,
    )
    if report.low_n:
        logger.warning(f"Only {len(records)} records; correlation checks are advisory")
    for check in checks:
        if not check.passed:
            logger.warning(
                f"Correlation ({check.left}, {check.right}) = {check.achieved} "
                f"misses target {check.target}"
            )
    return report
