"""Binary confusion matrix and the scores derived from it (positive class = 1)."""

from typing import Sequence

import numpy as np

from src.errors import DatasetError
from src.models.reports import ConfusionMatrix, Metrics


def confusion_matrix(
    truth: Sequence[int] | np.ndarray, predicted: Sequence[int] | np.ndarray
) -> ConfusionMatrix:
    truth, predicted = np.asarray(truth), np.asarray(predicted)
    if truth.shape != predicted.shape:
        raise DatasetError(f"{len(truth)} true labels vs {len(predicted)} predictions")
    return ConfusionMatrix(
        tp=int(((truth == 1) & (predicted == 1)).sum()),
        fp=int(((truth == 0) & (predicted == 1)).sum()),
        fn=int(((truth == 1) & (predicted == 0)).sum()),
        tn=int(((truth == 0) & (predicted == 0)).sum()),
    )


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Accuracy, precision, recall and F1; zero-denominator ratios are defined as 0."""
    if cm.total == 0:
        raise DatasetError("cannot score an empty confusion matrix")
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision=precision,
        recall=recall,
        f1=f1,
    )
