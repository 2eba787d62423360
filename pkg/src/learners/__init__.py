"""Classifiers: random forest, RBF SVM, k-nearest neighbours and a constant baseline."""

from .trees import (
    DecisionTree,
    Forest,
    RFParams,
    TreeParams,
    best_split,
    fit_forest,
    fit_tree,
    gini,
    gini_importance,
    predict,
)
from .svm import (
    SVMModel,
    SVMParams,
    balanced_weights,
    check_kkt,
    decision_and_predict,
    dual_objective,
    rbf_kernel,
    smo_fit,
)
from .knn import KNNModel, KNNParams, fit_knn, kneighbors, predict_knn
from .base import ConstantModel, FittedModel, ModelSpec, fit_model, select_columns

__all__ = [
    "DecisionTree",
    "Forest",
    "RFParams",
    "TreeParams",
    "best_split",
    "fit_forest",
    "fit_tree",
    "gini",
    "gini_importance",
    "predict",
    "SVMModel",
    "SVMParams",
    "balanced_weights",
    "check_kkt",
    "decision_and_predict",
    "dual_objective",
    "rbf_kernel",
    "smo_fit",
    "KNNModel",
    "KNNParams",
    "fit_knn",
    "kneighbors",
    "predict_knn",
    "ConstantModel",
    "FittedModel",
    "ModelSpec",
    "fit_model",
    "select_columns",
]
