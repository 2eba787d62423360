"""Feature importance: forest Gini importance and permutation importance."""

import logging
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from src.errors import ImportanceError, ParameterError
from src.evaluation.metrics import confusion_matrix, metrics
from src.learners.base import FittedModel
from src.learners.trees import Forest, gini_importance
from src.models.dataset import Dataset
from src.models.reports import FeatureImportance

logger = logging.getLogger(__name__)


def forest_importance(model: FittedModel) -> FeatureImportance:
    """Gini importance of a fitted random forest."""
    if not isinstance(model.estimator, Forest):
        raise ImportanceError(f"Gini importance needs a random forest, got {model.spec.kind}")
    values = gini_importance(model.estimator)
    return FeatureImportance(
        method="gini",
        feature_names=list(model.used_feature_names),
        importances=[float(v) for v in values],
    )


def _f1(model: FittedModel, dataset: Dataset) -> float:
    predicted, _ = model.predict(dataset)
    return metrics(confusion_matrix(dataset.labels, predicted)).f1


def _column_scores(
    model: FittedModel, dataset: Dataset, column: int, repeats: int, seed: int
) -> list[float]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, column]))
    scores = []
    for _ in range(repeats):
        shuffled = dataset.features.copy()
        shuffled[:, column] = shuffled[rng.permutation(dataset.n_rows), column]
        scores.append(_f1(model, dataset.with_features(shuffled)))
    return scores


def permutation_importance(
    model: FittedModel,
    dataset: Dataset,
    repeats: int = 5,
    seed: int = 0,
    n_jobs: Optional[int] = None,
) -> FeatureImportance:
    """Baseline F1 minus the mean F1 after shuffling each column ``repeats`` times.

    Column ``j`` is shuffled with its own stream derived from ``(seed, j)``.
    Values may be negative.

    Raises:
        ParameterError: ``repeats`` is below 1
        ImportanceError: the evaluation data has a single class
    """
    if repeats < 1:
        raise ParameterError(f"repeats must be at least 1, got {repeats}")
    if dataset.single_class:
        raise ImportanceError("permutation importance needs both classes in the data")
    baseline = _f1(model, dataset)
    per_column = Parallel(n_jobs=n_jobs or 1)(
        delayed(_column_scores)(model, dataset, j, repeats, seed) for j in range(dataset.n_features)
    )
    drops = np.array([[baseline - s for s in scores] for scores in per_column])
    logger.info(
        f"Permutation importance over {dataset.n_features} features, baseline F1 {baseline:.4f}"
    )
    return FeatureImportance(
        method="permutation",
        feature_names=list(dataset.feature_names),
        importances=[float(v) for v in drops.mean(axis=1)],
        stds=[float(v) for v in drops.std(axis=1)],
        baseline=baseline,
    )
