"""Model specifications and fitted models bundling estimator, scaler and schema."""

import logging
from dataclasses import dataclass
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import ParameterError, PredictionError, TrainingError, TransformError
from src.learners.knn import KNNModel, KNNParams, fit_knn, predict_knn
from src.learners.svm import SVMModel, SVMParams, decision_and_predict, smo_fit
from src.learners.trees import Forest, RFParams, fit_forest, predict_forest
from src.models.dataset import Dataset
from src.preprocess.scaling import FittedTransform, ScalerKind, apply_scaler, fit_scaler
from src.preprocess.smote import smote

logger = logging.getLogger(__name__)

ModelKind = Literal["rf", "svm", "knn", "constant"]

DEFAULT_SCALER: dict[str, Optional[ScalerKind]] = {
    "rf": None,
    "svm": "standard_scale",
    "knn": "min_max_scale",
    "constant": None,
}

ColumnSet = Literal["all", "numeric"]

# KNN trains on the non-indicator columns unless a spec says otherwise.
DEFAULT_COLUMNS: dict[str, ColumnSet] = {
    "rf": "all",
    "svm": "all",
    "knn": "numeric",
    "constant": "all",
}


def select_columns(feature_names: Sequence[str], columns: ColumnSet) -> list[int]:
    """Positions of the columns a model trains on.

    ``numeric`` drops one-hot indicator columns (named ``field=level``) and keeps
    numeric, boolean, ordinal and binned columns.
    """
    if columns == "all":
        return list(range(len(feature_names)))
    return [i for i, name in enumerate(feature_names) if "=" not in name]


def select_dataset_columns(dataset: Dataset, columns: ColumnSet) -> Dataset:
    """``dataset`` restricted to the columns of ``columns``."""
    idx = select_columns(dataset.feature_names, columns)
    if len(idx) == dataset.n_features:
        return dataset
    if not idx:
        raise ParameterError(f"no {columns} columns among {list(dataset.feature_names)[:5]}...")
    return dataset.with_features(
        dataset.features[:, idx], [dataset.feature_names[i] for i in idx]
    )


class ModelSpec(BaseModel):
    """A named learner configuration evaluated by the harness.

    ``params`` holds the learner's own parameters (RFParams, SVMParams or
    KNNParams fields). ``scaler`` defaults to standard scaling for SVM, min-max
    for KNN and none for trees. ``columns`` defaults to ``numeric`` for KNN and
    ``all`` otherwise.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    kind: ModelKind
    params: dict[str, Any] = Field(default_factory=dict)
    scaler: Optional[Literal["standard_scale", "min_max_scale", "none"]] = None
    columns: Optional[ColumnSet] = None
    smote: bool = False
    smote_k: int = Field(5, ge=1)
    smote_ratio: float = Field(1.0, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _params_valid(self) -> "ModelSpec":
        self.learner_params()
        return self

    @property
    def scaler_kind(self) -> Optional[ScalerKind]:
        if self.scaler is None:
            return DEFAULT_SCALER[self.kind]
        return None if self.scaler == "none" else self.scaler

    @property
    def column_set(self) -> ColumnSet:
        return DEFAULT_COLUMNS[self.kind] if self.columns is None else self.columns

    def learner_params(self) -> Union[RFParams, SVMParams, KNNParams, None]:
        if self.kind == "rf":
            return RFParams(**self.params)
        if self.kind == "svm":
            return SVMParams(**self.params)
        if self.kind == "knn":
            return KNNParams(**self.params)
        if self.params:
            raise ValueError("the constant baseline takes no parameters")
        return None


@dataclass(frozen=True)
class ConstantModel:
    """Predicts one class for every row."""

    label: int

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConstantModel":
        return cls(label=int(data["label"]))


Estimator = Union[Forest, SVMModel, KNNModel, ConstantModel]

_ESTIMATOR_TYPES: dict[str, type] = {
    "rf": Forest,
    "svm": SVMModel,
    "knn": KNNModel,
    "constant": ConstantModel,
}


@dataclass(frozen=True)
class FittedModel:
    """A trained estimator with the scaler and feature schema it expects."""

    spec: ModelSpec
    estimator: Estimator
    scaler: Optional[FittedTransform]
    feature_names: tuple[str, ...]
    training_fingerprint: str
    smote_rows: int = 0

    @property
    def converged(self) -> bool:
        return not isinstance(self.estimator, SVMModel) or self.estimator.converged

    @property
    def used_feature_names(self) -> tuple[str, ...]:
        """Columns the estimator was trained on, a subset of ``feature_names``."""
        idx = select_columns(self.feature_names, self.spec.column_set)
        return tuple(self.feature_names[i] for i in idx)

    def _training_columns(self, dataset: Dataset) -> Dataset:
        if self.used_feature_names == self.feature_names:
            return dataset
        if dataset.feature_names != self.feature_names:
            raise TransformError(
                f"feature schema mismatch: model expects {len(self.feature_names)} columns, "
                f"got {dataset.n_features}"
            )
        return select_dataset_columns(dataset, self.spec.column_set)

    def predict(self, dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
        """Labels and class-1 scores for every row of ``dataset``.

        Scores are vote fractions (forest, KNN), decision values (SVM) or the
        constant label.

        Raises:
            TransformError: the feature schema differs from the training schema
            PredictionError: width mismatch without a scaler to report it
        """
        dataset = self._training_columns(dataset)
        if self.scaler is not None:
            dataset = apply_scaler(self.scaler, dataset)
        elif dataset.feature_names != self.used_feature_names:
            expected = list(self.used_feature_names)
            raise PredictionError(
                f"feature schema mismatch: model expects {len(expected)} columns "
                f"{expected[:5]}..., got {list(dataset.feature_names)[:5]}..."
            )
        rows = dataset.features
        fingerprint = self.scaler.fingerprint if self.scaler is not None else None
        estimator = self.estimator
        if isinstance(estimator, Forest):
            return predict_forest(estimator, rows)
        if isinstance(estimator, SVMModel):
            if estimator.scaler_fingerprint != fingerprint:
                raise PredictionError("rows were scaled with a different transform than the SVM")
            values, labels = decision_and_predict(estimator, rows)
            return labels, values
        if isinstance(estimator, KNNModel):
            labels, shares = predict_knn(estimator, rows, scaler_fingerprint=fingerprint)
            return labels, shares[:, 1]
        labels = np.full(dataset.n_rows, estimator.label, dtype=np.int64)
        return labels, labels.astype(np.float64)

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec.model_dump(),
            "estimator": self.estimator.to_dict(),
            "scaler": None if self.scaler is None else self.scaler.model_dump(),
            "feature_names": list(self.feature_names),
            "training_fingerprint": self.training_fingerprint,
            "smote_rows": self.smote_rows,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FittedModel":
        spec = ModelSpec(**data["spec"])
        return cls(
            spec=spec,
            estimator=_ESTIMATOR_TYPES[spec.kind].from_dict(data["estimator"]),
            scaler=None if data["scaler"] is None else FittedTransform(**data["scaler"]),
            feature_names=tuple(data["feature_names"]),
            training_fingerprint=data["training_fingerprint"],
            smote_rows=int(data.get("smote_rows", 0)),
        )


def fit_model(
    spec: ModelSpec,
    dataset: Dataset,
    seed: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> FittedModel:
    """Select columns, scale, optionally oversample, and train ``spec`` on ``dataset``.

    The scaler and SMOTE are fitted on ``dataset`` alone, so callers pass only
    training rows. ``seed`` overrides the learner's own seed.

    Raises:
        TrainingError: empty or single-class training data
        ParameterError: the spec's column set leaves no columns
    """
    if dataset.empty:
        raise TrainingError(f"{spec.name}: training data has no rows")
    if dataset.single_class:
        raise TrainingError(f"{spec.name}: training data has a single class")
    train = select_dataset_columns(dataset, spec.column_set)
    scaler = None
    if spec.scaler_kind is not None:
        scaler = fit_scaler(train, spec.scaler_kind)
        train = apply_scaler(scaler, train)
    smote_rows = 0
    if spec.smote:
        resampled = smote(train, spec.smote_k, spec.smote_ratio, seed or 0)
        smote_rows = resampled.n_rows - train.n_rows
        train = resampled

    params = spec.learner_params()
    if seed is not None and isinstance(params, (RFParams, SVMParams)):
        params = params.model_copy(update={"seed": seed})
    fingerprint = scaler.fingerprint if scaler is not None else None

    estimator: Estimator
    if isinstance(params, RFParams):
        estimator = fit_forest(train, params, n_jobs=n_jobs)
    elif isinstance(params, SVMParams):
        estimator = smo_fit(train, params, scaler_fingerprint=fingerprint)
    elif isinstance(params, KNNParams):
        estimator = fit_knn(train, params, scaler_fingerprint=fingerprint)
    elif spec.kind == "constant":
        zeros, ones = train.class_counts()
        estimator = ConstantModel(label=int(ones > zeros))
    else:
        raise ParameterError(f"unknown model kind {spec.kind}")

    return FittedModel(
        spec=spec,
        estimator=estimator,
        scaler=scaler,
        feature_names=dataset.feature_names,
        training_fingerprint=dataset.fingerprint(),
        smote_rows=smote_rows,
    )
