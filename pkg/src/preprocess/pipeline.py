"""Fit-once, replay-anywhere preprocessing: impute, clip, derive, window, encode."""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.errors import TransformError
from src.models.dataset import Dataset
from src.models.records import AuditRecord, records_to_frame
from src.preprocess.cleaning import (
    ClipRule,
    ImputePolicy,
    apply_clip_bounds,
    apply_imputation,
    fit_clip_bounds,
    fit_imputation,
)
from src.preprocess.encoding import EncodingPlan, encode, split_list
from src.preprocess.features import WindowSpec, derive_features, group_keys, windowize

logger = logging.getLogger(__name__)


class DeriveSettings(BaseModel):
    """History-feature derivation options."""

    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    group_by: list[str] = Field(default_factory=lambda: ["firm_name"])
    trend_fields: list[str] = Field(default_factory=list)

    _split = field_validator("group_by", "trend_fields", mode="before")(split_list)


class WindowSettings(WindowSpec):
    """Window layout plus an on/off switch (off by default)."""

    enabled: bool = False


class PreprocessSettings(BaseModel):
    """Preprocessing section of the pipeline configuration."""

    model_config = ConfigDict(extra="forbid")

    impute: ImputePolicy = Field(default_factory=ImputePolicy)
    clip: ClipRule = Field(default_factory=ClipRule)
    derive: DeriveSettings = Field(default_factory=DeriveSettings)
    window: WindowSettings = Field(default_factory=WindowSettings)
    encode: EncodingPlan = Field(default_factory=EncodingPlan)


@dataclass(frozen=True)
class PreparedData:
    """Output of fitting the feature pipeline on training records."""

    pipeline: "FeaturePipeline"
    dataset: Dataset
    statistics: dict[str, Any]


class FeaturePipeline(BaseModel):
    """Preprocessing state learned from training records.

    Unfitted, it carries only settings. ``fit_transform`` returns a fitted copy
    holding imputation statistics, clip bounds and the resolved encoding plan,
    which ``transform`` replays on new records.
    """

    settings: PreprocessSettings = Field(default_factory=PreprocessSettings)
    imputation: dict[str, Any] = Field(default_factory=dict)
    clip_bounds: dict[str, tuple[float, float]] = Field(default_factory=dict)
    plan: Optional[EncodingPlan] = None

    @property
    def fitted(self) -> bool:
        return self.plan is not None

    def _frame(self, records: Sequence[AuditRecord]) -> pd.DataFrame:
        frame = records_to_frame(records)
        derive = self.settings.derive
        if derive.enabled:
            extra = derive_features(frame, derive.group_by, derive.trend_fields)
            frame = pd.concat([frame, extra], axis=1)
        return frame

    def _assemble(self, frame: pd.DataFrame, labels: np.ndarray, plan: EncodingPlan) -> Dataset:
        window = self.settings.window
        if window.enabled:
            spec = WindowSpec(**window.model_dump(exclude={"enabled"}))
            return windowize(frame, spec, labels, plan)
        encoded = encode(frame, plan)
        return Dataset(
            features=encoded.matrix,
            feature_names=encoded.feature_names,
            labels=labels,
            group_keys=tuple(group_keys(frame, self.settings.derive.group_by)),
            metadata={"encoding_plan": encoded.plan},
        )

    def fit_transform(
        self, records: Sequence[AuditRecord], labels: Sequence[int] | np.ndarray
    ) -> PreparedData:
        """Fit every stage on ``records`` and return the fitted pipeline and dataset."""
        labels_arr = np.asarray(labels, dtype=np.int64)
        imputation = fit_imputation(records, self.settings.impute)
        cleaned, filled = apply_imputation(records, imputation)
        bounds = fit_clip_bounds(cleaned, self.settings.clip) if self.settings.clip.enabled else {}
        cleaned, clipped = apply_clip_bounds(cleaned, bounds)

        frame = self._frame(cleaned)
        resolved = encode(frame, self.settings.encode).plan
        fitted = self.model_copy(
            update={"imputation": imputation, "clip_bounds": bounds, "plan": resolved}
        )
        dataset = fitted._assemble(frame, labels_arr, resolved)
        logger.info(
            f"Prepared {dataset.n_rows} rows x {dataset.n_features} features "
            f"(imputed {sum(filled.values())} cells, clipped {sum(clipped.values())})"
        )
        statistics = {
            "imputation": imputation,
            "filled": filled,
            "clip_bounds": bounds,
            "clipped": clipped,
        }
        return PreparedData(pipeline=fitted, dataset=dataset, statistics=statistics)

    def transform(
        self,
        records: Sequence[AuditRecord],
        labels: Optional[Sequence[int] | np.ndarray] = None,
    ) -> Dataset:
        """Replay the fitted stages on new records (labels default to zeros)."""
        if self.plan is None:
            raise TransformError("feature pipeline is not fitted")
        cleaned, _ = apply_imputation(records, self.imputation)
        cleaned, _ = apply_clip_bounds(cleaned, self.clip_bounds)
        labels_arr = (
            np.zeros(len(records), dtype=np.int64)
            if labels is None
            else np.asarray(labels, dtype=np.int64)
        )
        return self._assemble(self._frame(cleaned), labels_arr, self.plan)
