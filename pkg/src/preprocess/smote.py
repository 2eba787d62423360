"""SMOTE oversampling of the minority class."""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.errors import ParameterError, ResamplingError
from src.models.dataset import Dataset
from src.preprocess.encoding import split_list

logger = logging.getLogger(__name__)

SYNTHETIC_GROUP = "<synthetic>"


class SmoteSettings(BaseModel):
    """Where and how SMOTE runs inside training folds."""

    model_config = ConfigDict(extra="forbid")

    models: list[str] = Field(
        default_factory=lambda: ["knn"], description="Model kinds to resample for"
    )
    k: int = Field(5, ge=1)
    target_ratio: float = Field(1.0, gt=0.0, le=1.0)

    _split = field_validator("models", mode="before")(split_list)


def minority_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest other points (Euclidean), ties to the lower index."""
    result = np.empty((len(points), k), dtype=np.int64)
    for i, point in enumerate(points):
        dist = np.sqrt(((points - point) ** 2).sum(axis=1))
        dist[i] = np.inf
        result[i] = np.argsort(dist, kind="stable")[:k]
    return result


def smote(dataset: Dataset, k: int, target_ratio: float, seed: int) -> Dataset:
    """Append synthetic minority rows until minority/majority >= ``target_ratio``.

    Each synthetic row is ``x + u * (x_nn - x)`` for a minority row ``x`` drawn from
    the seeded stream, one of its ``k`` nearest minority neighbours ``x_nn`` and
    ``u ~ U[0, 1]``. Original rows are kept unchanged and first.

    Raises:
        ResamplingError: fewer than two minority rows
        ParameterError: ``k`` is not below the minority count
    """
    if not 0 < target_ratio <= 1:
        raise ParameterError(f"target_ratio must be in (0, 1], got {target_ratio}")
    counts = dataset.class_counts()
    minority = 0 if counts[0] < counts[1] else 1
    n_min, n_maj = counts[minority], counts[1 - minority]
    n_new = max(0, math.ceil(target_ratio * n_maj) - n_min)
    if n_new == 0:
        return dataset
    if n_min < 2:
        raise ResamplingError(f"SMOTE needs at least 2 minority rows, got {n_min}")
    if k < 1 or k > n_min - 1:
        raise ParameterError(f"SMOTE k={k} must be in [1, {n_min - 1}]")

    rng = np.random.default_rng(seed)
    minority_rows = np.flatnonzero(dataset.labels == minority)
    points = dataset.features[minority_rows]
    neighbors = minority_neighbors(points, k)

    synthetic = np.empty((n_new, dataset.n_features))
    for s in range(n_new):
        base = rng.integers(len(points))
        partner = neighbors[base, rng.integers(k)]
        u = rng.random()
        synthetic[s] = points[base] + u * (points[partner] - points[base])
    logger.info(f"SMOTE appended {n_new} synthetic rows of class {minority} (k={k})")

    return Dataset(
        features=np.vstack([dataset.features, synthetic]),
        feature_names=dataset.feature_names,
        labels=np.concatenate([dataset.labels, np.full(n_new, minority)]),
        group_keys=dataset.group_keys + (SYNTHETIC_GROUP,) * n_new,
        schema_version=dataset.schema_version,
        row_index=np.concatenate([dataset.row_index, np.full(n_new, -1)]),
        is_synthetic=np.concatenate([dataset.is_synthetic, np.ones(n_new, dtype=bool)]),
        metadata={
            **{k_: v for k_, v in dataset.metadata.items() if k_ != "single_class"},
            "smote_rows": n_new,
        },
    )
