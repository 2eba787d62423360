"""Immutable numeric dataset container."""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from src.errors import DatasetError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "auditml-dataset/1"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, feature schema, binary labels and provenance.

    Attributes:
        features: n x p float matrix, no missing values; n is 0 only for a
            windowed dataset whose runs were all shorter than the window
        feature_names: p column names
        labels: n labels in {0, 1}
        group_keys: n group identities (firm), used for window grouping
        schema_version: dataset schema tag
        row_index: source-record index per row (-1 for synthetic rows)
        is_synthetic: n flags, True for rows appended by SMOTE
        metadata: free-form provenance (``single_class`` is always present)
    """

    features: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray
    group_keys: tuple[str, ...]
    schema_version: str = SCHEMA_VERSION
    row_index: Optional[np.ndarray] = None
    is_synthetic: Optional[np.ndarray] = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DatasetError(f"features must be a 2-D matrix, got {features.ndim} dims")
        n, p = features.shape
        if len(self.feature_names) != p:
            raise DatasetError(
                f"{len(self.feature_names)} feature names for {p} feature columns"
            )
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (n,) or len(self.group_keys) != n:
            raise DatasetError(
                f"row count mismatch: features {n}, labels {labels.shape[0]}, "
                f"group keys {len(self.group_keys)}"
            )
        if not np.isin(labels, (0, 1)).all():
            raise DatasetError("labels must be 0 or 1")
        if not np.isfinite(features).all():
            bad_row, bad_col = np.argwhere(~np.isfinite(features))[0]
            raise DatasetError(
                "residual missing or non-finite value",
                row=int(bad_row),
                column=self.feature_names[bad_col],
            )

        row_index = np.arange(n) if self.row_index is None else np.asarray(self.row_index)
        synthetic = (
            np.zeros(n, dtype=bool) if self.is_synthetic is None else np.asarray(self.is_synthetic)
        )
        if row_index.shape != (n,) or synthetic.shape != (n,):
            raise DatasetError("row_index / is_synthetic length mismatch")

        metadata = dict(self.metadata)
        single_class = bool(np.unique(labels).size < 2)
        metadata["single_class"] = single_class
        if n == 0:
            logger.debug("Dataset has no rows; training will reject it")
        elif single_class and not self.metadata.get("single_class"):
            logger.warning(
                f"Dataset has a single class ({int(labels[0])}); training will reject it"
            )

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "group_keys", tuple(self.group_keys))
        object.__setattr__(self, "row_index", _frozen(row_index.astype(np.int64)))
        object.__setattr__(self, "is_synthetic", _frozen(synthetic.astype(bool)))
        object.__setattr__(self, "metadata", metadata)

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def empty(self) -> bool:
        return self.n_rows == 0

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def single_class(self) -> bool:
        return bool(self.metadata["single_class"])

    def class_counts(self) -> tuple[int, int]:
        """Counts of label 0 and label 1."""
        ones = int(self.labels.sum())
        return self.n_rows - ones, ones

    def fingerprint(self) -> str:
        """SHA-256 over feature names, feature bytes and labels."""
        digest = hashlib.sha256()
        digest.update("\x1f".join(self.feature_names).encode("utf-8"))
        digest.update(np.ascontiguousarray(self.features).tobytes())
        digest.update(np.ascontiguousarray(self.labels).tobytes())
        return digest.hexdigest()

    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        """Rows at ``indices``, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            feature_names=self.feature_names,
            labels=self.labels[idx],
            group_keys=tuple(self.group_keys[i] for i in idx),
            schema_version=self.schema_version,
            row_index=self.row_index[idx],
            is_synthetic=self.is_synthetic[idx],
            metadata={k: v for k, v in self.metadata.items() if k != "single_class"},
        )

    def with_features(
        self, features: np.ndarray, feature_names: Optional[Sequence[str]] = None
    ) -> "Dataset":
        """Same rows and labels with a replaced feature matrix."""
        return Dataset(
            features=features,
            feature_names=tuple(feature_names) if feature_names is not None else self.feature_names,
            labels=self.labels,
            group_keys=self.group_keys,
            schema_version=self.schema_version,
            row_index=self.row_index,
            is_synthetic=self.is_synthetic,
            metadata={k: v for k, v in self.metadata.items() if k != "single_class"},
        )
