"""Fold splitting, scoring, cross-validation, importance and figure aggregates."""

from .metrics import confusion_matrix, metrics
from .correlation import correlation_frame, pearson, pearson_matrix
from .folds import folds_digest, stratified_folds
from .harness import (
    compare_models,
    cross_validate,
    default_specs,
    format_table,
    sweep_svm,
)
from .importance import forest_importance, permutation_importance
from .figures import FigureAggregates, figure_aggregates

__all__ = [
    "confusion_matrix",
    "metrics",
    "correlation_frame",
    "pearson",
    "pearson_matrix",
    "folds_digest",
    "stratified_folds",
    "compare_models",
    "cross_validate",
    "default_specs",
    "format_table",
    "sweep_svm",
    "forest_importance",
    "permutation_importance",
    "FigureAggregates",
    "figure_aggregates",
]
