"""Cross-validation harness, model comparison and the SVM hyperparameter sweep."""

import logging
import time
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.errors import AuditMLError, ParameterError
from src.evaluation.folds import folds_digest, stratified_folds
from src.evaluation.metrics import confusion_matrix, metrics
from src.learners.base import ModelSpec, fit_model
from src.models.dataset import Dataset
from src.models.reports import ComparisonTable, CVReport, FoldResult

logger = logging.getLogger(__name__)

DISPLAY_NAMES = {"rf": "Random Forest", "svm": "SVM", "knn": "KNN", "constant": "Constant"}
DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA_GRID = (0.01, 0.1, 1.0)


def default_specs() -> list[ModelSpec]:
    """The three compared learners with their default parameters."""
    return [
        ModelSpec(name="rf", kind="rf"),
        ModelSpec(name="svm", kind="svm"),
        ModelSpec(name="knn", kind="knn", smote=True),
    ]


def _fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


def _run_fold(
    spec: ModelSpec, dataset: Dataset, fold: int, test_idx: np.ndarray, seed: int
) -> FoldResult:
    started = time.perf_counter()
    train_idx = np.setdiff1d(np.arange(dataset.n_rows), test_idx, assume_unique=True)
    try:
        fitted = fit_model(spec, dataset.subset(train_idx), seed=_fold_seed(seed, fold))
        predicted, _ = fitted.predict(dataset.subset(test_idx))
    except AuditMLError as err:
        raise err.with_fold(fold) from err
    if not fitted.converged:
        logger.warning(f"{spec.name} fold {fold}: SVM did not converge; scoring partial model")
    cm = confusion_matrix(dataset.labels[test_idx], predicted)
    result = FoldResult(
        fold=fold,
        n_train=len(train_idx),
        n_test=len(test_idx),
        confusion=cm,
        metrics=metrics(cm),
        wall_time=time.perf_counter() - started,
    )
    logger.info(
        f"{spec.name} fold {fold}: f1={result.metrics.f1:.4f} "
        f"accuracy={result.metrics.accuracy:.4f} ({result.wall_time:.2f}s)"
    )
    return result


def cross_validate(
    spec: ModelSpec,
    dataset: Dataset,
    k: int = 5,
    seed: int = 42,
    folds: Optional[Sequence[np.ndarray]] = None,
    n_jobs: Optional[int] = None,
) -> CVReport:
    """Stratified K-fold scores for one model specification.

    Scaling and SMOTE are fitted inside each training fold only. Folds run in
    parallel when ``n_jobs`` allows; results are merged in fold order.

    Raises:
        StratificationError: a class has fewer than ``k`` rows
        AuditMLError: any fold failure, re-raised with its fold index
    """
    folds = list(folds) if folds is not None else stratified_folds(dataset.labels, k, seed)
    results = Parallel(n_jobs=n_jobs or 1)(
        delayed(_run_fold)(spec, dataset, i, test_idx, seed) for i, test_idx in enumerate(folds)
    )
    return CVReport.from_folds(
        model_name=spec.name,
        model_kind=spec.kind,
        seed=seed,
        folds_digest=folds_digest(folds),
        folds=list(results),
    )


def compare_models(
    specs: Sequence[ModelSpec],
    dataset: Dataset,
    k: int = 5,
    seed: int = 42,
    n_jobs: Optional[int] = None,
) -> ComparisonTable:
    """Cross-validate every spec on the same folds and rank by mean F1."""
    if not specs:
        raise ParameterError("compare_models needs at least one model spec")
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise ParameterError(f"model names must be unique: {names}")
    folds = stratified_folds(dataset.labels, k, seed)
    reports = [cross_validate(spec, dataset, k, seed, folds=folds, n_jobs=n_jobs) for spec in specs]
    assert len({report.folds_digest for report in reports}) == 1
    table = ComparisonTable(rows=reports)
    logger.info(f"Ranking by mean F1: {table.ranking}")
    return table


def sweep_svm(
    dataset: Dataset,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    base: Optional[ModelSpec] = None,
    k: int = 5,
    seed: int = 42,
    n_jobs: Optional[int] = None,
) -> ComparisonTable:
    """Grid search over (C, gamma) with the cross-validation harness."""
    base = base or ModelSpec(name="svm", kind="svm")
    specs = [
        ModelSpec(
            **{
                **base.model_dump(),
                "name": f"svm[C={c:g},gamma={g:g}]",
                "params": {**base.params, "C": c, "gamma": g},
            }
        )
        for c in c_grid
        for g in gamma_grid
    ]
    return compare_models(specs, dataset, k, seed, n_jobs=n_jobs)


def format_table(table: ComparisonTable) -> str:
    """Fixed-width comparison table with 4-decimal means, best model first."""
    lines = [
        "# binary metrics; positive class = high risk (label 1); mean over folds",
        f"{'Model':<24} {'Mean F1 Score':>14} {'Mean Accuracy':>14} {'Mean Recall':>12}",
    ]
    for row in table.rows:
        name = DISPLAY_NAMES.get(row.model_name, row.model_name)
        lines.append(
            f"{name:<24} {row.f1.mean:>14.4f} {row.accuracy.mean:>14.4f} {row.recall.mean:>12.4f}"
        )
    return "\n".join(lines) + "\n"
