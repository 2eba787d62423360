"""Unit tests for the SMO-trained RBF SVM."""

import math

import numpy as np
import pytest

from src.errors import PredictionError, TrainingError, WeightingError
from src.learners import (
    SVMModel,
    SVMParams,
    balanced_weights,
    check_kkt,
    decision_and_predict,
    dual_objective,
    rbf_kernel,
    smo_fit,
)
from tests.conftest import make_dataset


def test_rbf_kernel():
    """Test kernel value and dimension check."""
    assert rbf_kernel([0.0, 0.0], [1.0, 1.0], 0.5) == pytest.approx(math.exp(-1.0))
    assert rbf_kernel([3.0], [3.0], 2.0) == 1.0
    with pytest.raises(PredictionError):
        rbf_kernel([0.0], [0.0, 1.0], 1.0)


def test_balanced_weights():
    """Test n / (2 * n_c) per class."""
    assert balanced_weights(np.array([0, 0, 0, 1])) == pytest.approx((4 / 6, 2.0))
    with pytest.raises(WeightingError):
        balanced_weights(np.array([1, 1]))


def test_two_point_solution():
    """Test the closed-form dual solution for two opposite points."""
    dataset = make_dataset([[0.0], [2.0]], [0, 1])
    params = SVMParams(C=10.0, gamma=0.1, class_weighting="none", tolerance=1e-6)
    model = smo_fit(dataset, params)

    k = math.exp(-0.4)
    alpha = 1.0 / (1.0 - k)
    assert model.converged
    assert model.alphas == pytest.approx([alpha, alpha], abs=1e-6)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    assert dual_objective(model) == pytest.approx(alpha, rel=1e-3)
    values, labels = decision_and_predict(model, np.array([[0.0], [2.0], [1.0]]))
    assert values[:2] == pytest.approx([-1.0, 1.0], abs=1e-3)
    assert labels[:2].tolist() == [0, 1]


def test_decision_zero_is_positive():
    """Test that f(x) = 0 is labelled 1."""
    model = SVMModel(
        support_indices=np.array([], dtype=np.int64),
        support_vectors=np.empty((0, 1)),
        support_labels=np.array([]),
        alphas=np.array([]),
        upper_bounds=np.array([]),
        bias=0.0,
        gamma=1.0,
        scaler_fingerprint=None,
        converged=True,
        n_passes=0,
    )
    _, labels = decision_and_predict(model, np.array([[5.0]]))

    assert labels.tolist() == [1]


def test_fit_satisfies_kkt(separable_dataset):
    """Test the trained model meets the optimality conditions on its training rows."""
    model = smo_fit(separable_dataset, SVMParams(C=1.0, gamma=0.5))

    assert model.converged
    assert check_kkt(model, separable_dataset, tolerance=1e-3)
    assert np.all(model.alphas <= model.upper_bounds + 1e-9)
    _, labels = decision_and_predict(model, separable_dataset.features)
    assert np.array_equal(labels, separable_dataset.labels)


def test_balanced_bounds(separable_dataset):
    """Test per-sample box bounds under balanced weighting."""
    subset = separable_dataset.subset(np.r_[0:10, 40:80])
    model = smo_fit(subset, SVMParams(C=2.0))

    negative = model.support_labels < 0
    assert negative.any() and (~negative).any()
    assert model.upper_bounds[negative] == pytest.approx(2.0 * 50 / 20)
    assert model.upper_bounds[~negative] == pytest.approx(2.0 * 50 / 80)


@pytest.mark.parametrize("class_weighting", ["balanced", "none"])
def test_dual_objective_never_decreases(class_weighting):
    """Test every SMO step on overlapping classes keeps the dual objective non-decreasing."""
    rng = np.random.default_rng(11)
    features = rng.normal(size=(90, 2))
    labels = (features[:, 0] + 0.8 * rng.normal(size=90) > 0.4).astype(int)
    dataset = make_dataset(features, labels)
    params = SVMParams(C=5.0, gamma=0.7, class_weighting=class_weighting)

    checked = smo_fit(dataset, params.model_copy(update={"check_objective": True}))
    plain = smo_fit(dataset, params)

    assert np.array_equal(checked.alphas, plain.alphas)
    assert dual_objective(checked) > 0.0


def test_fit_is_deterministic(separable_dataset):
    """Test equal seeds give equal models."""
    a = smo_fit(separable_dataset, SVMParams(seed=5))
    b = smo_fit(separable_dataset, SVMParams(seed=5))

    assert np.array_equal(a.alphas, b.alphas)
    assert a.bias == b.bias


def test_pass_limit_reports_unconverged():
    """Test a run cut off after one pass is flagged, not raised."""
    rng = np.random.default_rng(8)
    dataset = make_dataset(rng.normal(size=(120, 2)), np.arange(120) % 2)
    model = smo_fit(dataset, SVMParams(C=100.0, gamma=5.0, max_passes=1))

    assert not model.converged
    assert model.n_passes == 1


def test_fit_rejects_single_class():
    """Test the single-class training error."""
    with pytest.raises(TrainingError):
        smo_fit(make_dataset([[0.0], [1.0]], [0, 0]))


def test_dict_round_trip(separable_dataset):
    """Test a model survives to_dict/from_dict."""
    model = smo_fit(separable_dataset, SVMParams(C=1.0))
    restored = SVMModel.from_dict(model.to_dict())

    values, _ = decision_and_predict(model, separable_dataset.features)
    restored_values, _ = decision_and_predict(restored, separable_dataset.features)
    assert np.array_equal(values, restored_values)
