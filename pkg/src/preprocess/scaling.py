"""Standard and min-max feature scaling fitted on one dataset, applied to others."""

import hashlib
import json
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import TransformError
from src.models.dataset import Dataset

ScalerKind = Literal["standard_scale", "min_max_scale"]


class FittedTransform(BaseModel):
    """Per-feature scaling statistics.

    ``center``/``spread`` hold mean/stddev for ``standard_scale`` and min/max for
    ``min_max_scale``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ScalerKind
    feature_names: list[str]
    center: list[float]
    spread: list[float]
    fitted_on: str = Field(..., description="Fingerprint of the fitting dataset")

    @model_validator(mode="after")
    def _consistent(self) -> "FittedTransform":
        p = len(self.feature_names)
        if len(self.center) != p or len(self.spread) != p:
            raise ValueError("statistics length does not match feature count")
        if self.kind == "standard_scale" and any(s < 0 for s in self.spread):
            raise ValueError("negative standard deviation")
        pairs = zip(self.center, self.spread)
        if self.kind == "min_max_scale" and any(lo > hi for lo, hi in pairs):
            raise ValueError("min exceeds max")
        return self

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON of this transform."""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def transform(self, features: np.ndarray) -> np.ndarray:
        """Scale a raw matrix whose columns follow ``feature_names``."""
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != len(self.feature_names):
            raise TransformError(
                f"expected {len(self.feature_names)} columns, got {x.shape[-1] if x.ndim else 0}"
            )
        center = np.asarray(self.center)
        spread = np.asarray(self.spread)
        if self.kind == "standard_scale":
            scale = spread
        else:
            scale = spread - center
        constant = scale == 0
        out = (x - center) / np.where(constant, 1.0, scale)
        out[:, constant] = 0.0
        return out


def fit_scaler(dataset: Dataset, kind: ScalerKind) -> FittedTransform:
    """Column statistics: mean and population stddev, or column min and max."""
    x = dataset.features
    if kind == "standard_scale":
        center, spread = x.mean(axis=0), x.std(axis=0)
    else:
        center, spread = x.min(axis=0), x.max(axis=0)
    return FittedTransform(
        kind=kind,
        feature_names=list(dataset.feature_names),
        center=[float(v) for v in center],
        spread=[float(v) for v in spread],
        fitted_on=dataset.fingerprint(),
    )


def apply_scaler(transform: FittedTransform, dataset: Dataset) -> Dataset:
    """Scale ``dataset``; constant columns map to zero; labels and keys unchanged.

    Raises:
        TransformError: feature names differ from the fitted ones
    """
    if list(dataset.feature_names) != transform.feature_names:
        fitted, given = set(transform.feature_names), set(dataset.feature_names)
        raise TransformError(
            f"feature schema mismatch: missing={sorted(fitted - given)} "
            f"unexpected={sorted(given - fitted)}"
            + ("" if fitted != given else " (order differs)")
        )
    return dataset.with_features(transform.transform(dataset.features))
