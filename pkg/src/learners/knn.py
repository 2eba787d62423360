"""Exact k-nearest-neighbour classifier with distance-weighted voting."""

import logging
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist

from src.errors import ParameterError, PredictionError
from src.models.dataset import Dataset

logger = logging.getLogger(__name__)

QUERY_BLOCK = 1024


class KNNParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    k: int = Field(5, ge=1)
    weighting: Literal["distance", "uniform"] = "distance"


@dataclass(frozen=True)
class KNNModel:
    """The stored training rows ("knowledge base") and voting parameters."""

    features: np.ndarray
    labels: np.ndarray
    params: KNNParams
    scaler_fingerprint: Optional[str] = None

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "features": self.features.tolist(),
            "labels": self.labels.tolist(),
            "n_features": self.n_features,
            "params": self.params.model_dump(),
            "scaler_fingerprint": self.scaler_fingerprint,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "KNNModel":
        return cls(
            features=np.asarray(data["features"], dtype=np.float64).reshape(
                -1, int(data["n_features"])
            ),
            labels=np.asarray(data["labels"], dtype=np.int64),
            params=KNNParams(**data["params"]),
            scaler_fingerprint=data.get("scaler_fingerprint"),
        )


def fit_knn(
    dataset: Dataset, params: Optional[KNNParams] = None, scaler_fingerprint: Optional[str] = None
) -> KNNModel:
    """Store every training row.

    Raises:
        ParameterError: k exceeds the number of rows
    """
    params = params or KNNParams()
    if params.k > dataset.n_rows:
        raise ParameterError(f"k={params.k} exceeds the {dataset.n_rows} training rows")
    return KNNModel(
        features=dataset.features.copy(),
        labels=dataset.labels.copy(),
        params=params,
        scaler_fingerprint=scaler_fingerprint,
    )


def _queries(model: KNNModel, rows: np.ndarray, scaler_fingerprint: Optional[str]) -> np.ndarray:
    x = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if x.shape[1] != model.n_features:
        raise PredictionError(f"expected queries of width {model.n_features}, got {x.shape[1]}")
    if scaler_fingerprint != model.scaler_fingerprint:
        if scaler_fingerprint is None:
            raise PredictionError("model was fitted on scaled rows; queries carry no scaler")
        raise PredictionError("queries were scaled with a different transform than the model")
    return x


def kneighbors(
    model: KNNModel,
    rows: np.ndarray,
    k: Optional[int] = None,
    scaler_fingerprint: Optional[str] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Indices and Euclidean distances of the k nearest stored rows, nearest first.

    Exact brute-force search; equal distances are ordered by lower row index.

    Returns:
        ``(indices, distances)``, both of shape (queries, k)
    """
    k = model.params.k if k is None else k
    if not 1 <= k <= len(model.labels):
        raise ParameterError(f"k={k} must be in [1, {len(model.labels)}]")
    x = _queries(model, rows, scaler_fingerprint)
    indices = np.empty((len(x), k), dtype=np.int64)
    distances = np.empty((len(x), k))
    for start in range(0, len(x), QUERY_BLOCK):
        block = cdist(x[start : start + QUERY_BLOCK], model.features, "euclidean")
        order = np.argsort(block, axis=1, kind="stable")[:, :k]
        indices[start : start + QUERY_BLOCK] = order
        distances[start : start + QUERY_BLOCK] = np.take_along_axis(block, order, axis=1)
    return indices, distances


def predict_knn(
    model: KNNModel, rows: np.ndarray, scaler_fingerprint: Optional[str] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Labels and per-class vote shares for each query row.

    Distance weighting gives each neighbour weight 1/d; when some neighbours sit
    at distance zero only they vote, with equal weight. Equal class totals go
    to class 0.

    Returns:
        ``(labels, shares)`` with shares of shape (queries, 2) summing to 1
    """
    indices, distances = kneighbors(model, rows, scaler_fingerprint=scaler_fingerprint)
    if model.params.weighting == "uniform":
        weights = np.ones_like(distances)
    else:
        zero = distances == 0
        exact = zero.any(axis=1, keepdims=True)
        weights = np.where(exact, zero.astype(np.float64), 1.0 / np.where(zero, 1.0, distances))
    neighbour_labels = model.labels[indices]
    ones = (weights * (neighbour_labels == 1)).sum(axis=1)
    zeros = (weights * (neighbour_labels == 0)).sum(axis=1)
    shares = np.column_stack([zeros, ones]) / (zeros + ones)[:, None]
    return (ones > zeros).astype(np.int64), shares
