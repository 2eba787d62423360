"""Report models for evaluation, generation checks and importance analysis."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class ConfusionMatrix(BaseModel):
    """Binary confusion matrix; the positive class is label 1 (high risk)."""

    model_config = ConfigDict(frozen=True)

    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    tn: int = Field(..., ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


class Metrics(BaseModel):
    """Scores derived from a confusion matrix."""

    model_config = ConfigDict(frozen=True)

    accuracy: float
    precision: float
    recall: float
    f1: float


class FoldResult(BaseModel):
    """Scores of one cross-validation fold."""

    fold: int
    n_train: int
    n_test: int
    confusion: ConfusionMatrix
    metrics: Metrics
    wall_time: float = Field(0.0, exclude=True, description="Seconds; kept out of report files")


class MetricSummary(BaseModel):
    """Mean and population standard deviation over folds."""

    mean: float
    std: float


class CVReport(BaseModel):
    """Per-fold and aggregate scores for one model specification."""

    model_name: str
    model_kind: str
    n_folds: int
    seed: int
    folds_digest: str = Field(..., description="SHA-256 of the fold index sets")
    folds: list[FoldResult]
    f1: MetricSummary
    accuracy: MetricSummary
    recall: MetricSummary
    precision: MetricSummary

    @model_validator(mode="after")
    def _fold_count(self) -> "CVReport":
        if len(self.folds) != self.n_folds:
            raise ValueError(f"expected {self.n_folds} folds, got {len(self.folds)}")
        return self

    @classmethod
    def from_folds(
        cls,
        model_name: str,
        model_kind: str,
        seed: int,
        folds_digest: str,
        folds: list[FoldResult],
    ) -> "CVReport":
        summaries = {}
        for metric in ("f1", "accuracy", "recall", "precision"):
            values = np.array([getattr(f.metrics, metric) for f in folds], dtype=np.float64)
            summaries[metric] = MetricSummary(mean=float(values.mean()), std=float(values.std()))
        return cls(
            model_name=model_name,
            model_kind=model_kind,
            n_folds=len(folds),
            seed=seed,
            folds_digest=folds_digest,
            folds=folds,
            **summaries,
        )


class ComparisonTable(BaseModel):
    """CV reports ranked by mean F1 (descending), ties by model name."""

    rows: list[CVReport]

    @model_validator(mode="after")
    def _ranked(self) -> "ComparisonTable":
        self.rows.sort(key=lambda r: (-r.f1.mean, r.model_name))
        return self

    @computed_field
    @property
    def ranking(self) -> list[str]:
        return [row.model_name for row in self.rows]


class CorrelationCheck(BaseModel):
    """Achieved vs. target correlation for one variable pair."""

    left: str
    right: str
    target: float
    achieved: Optional[float] = Field(None, description="None when undefined (zero variance)")
    deviation: Optional[float] = None
    passed: bool


class GenerationReport(BaseModel):
    """Outcome of validating generated records against their config."""

    n_records: int
    tolerance: float
    checks: list[CorrelationCheck]
    positive_rate: Optional[float]
    low_n: bool = Field(False, description="Tolerance checks advisory only below this size")

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class FeatureImportance(BaseModel):
    """Per-feature importance values, aligned with ``feature_names``."""

    method: str
    feature_names: list[str]
    importances: list[float]
    stds: Optional[list[float]] = None
    baseline: Optional[float] = None

    def ranked(self) -> list[tuple[str, float]]:
        """Features sorted by importance, descending; ties by column order."""
        order = sorted(range(len(self.importances)), key=lambda j: (-self.importances[j], j))
        return [(self.feature_names[j], self.importances[j]) for j in order]


class CorrelationMatrix(BaseModel):
    """Symmetric Pearson matrix; ``None`` marks undefined entries."""

    names: list[str]
    values: list[list[Optional[float]]]

    def get(self, left: str, right: str) -> Optional[float]:
        return self.values[self.names.index(left)][self.names.index(right)]
