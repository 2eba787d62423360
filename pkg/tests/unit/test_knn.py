"""Unit tests for the k-nearest-neighbour classifier."""

import numpy as np
import pytest

from src.errors import ParameterError, PredictionError
from src.learners import KNNModel, KNNParams, fit_knn, kneighbors, predict_knn
from tests.conftest import make_dataset


def test_kneighbors_matches_brute_force():
    """Test neighbour search against a direct distance sort."""
    rng = np.random.default_rng(6)
    stored = rng.normal(size=(500, 4))
    queries = rng.normal(size=(100, 4))
    model = fit_knn(make_dataset(stored, np.arange(500) % 2), KNNParams(k=5))

    indices, distances = kneighbors(model, queries)

    for q, query in enumerate(queries):
        d = np.sqrt(((stored - query) ** 2).sum(axis=1))
        expected = np.argsort(d, kind="stable")[:5]
        assert indices[q].tolist() == expected.tolist()
        assert distances[q] == pytest.approx(d[expected])


def test_equal_distances_prefer_lower_index():
    """Test neighbours at equal distance are ordered by row index."""
    model = fit_knn(make_dataset([[1.0], [-1.0], [1.0]], [0, 1, 1]), KNNParams(k=2))
    indices, _ = kneighbors(model, np.array([[0.0]]))

    assert indices.tolist() == [[0, 1]]


def test_distance_weighted_vote():
    """Test 1/d weighting outvotes a closer majority only when it should."""
    model = fit_knn(
        make_dataset([[0.1], [3.0], [3.1]], [1, 0, 0]), KNNParams(k=3, weighting="distance")
    )
    labels, shares = predict_knn(model, np.array([[0.0]]))

    assert labels.tolist() == [1]
    assert shares.sum(axis=1) == pytest.approx([1.0])


def test_zero_distance_neighbours_vote_alone():
    """Test that an exact match decides the vote."""
    model = fit_knn(make_dataset([[0.0], [0.01], [0.02]], [1, 0, 0]), KNNParams(k=3))
    labels, shares = predict_knn(model, np.array([[0.0]]))

    assert labels.tolist() == [1]
    assert shares[0].tolist() == [0.0, 1.0]


def test_tie_goes_to_class_zero():
    """Test equal class totals predict 0."""
    model = fit_knn(
        make_dataset([[-1.0], [1.0]], [1, 0]), KNNParams(k=2, weighting="uniform")
    )
    labels, shares = predict_knn(model, np.array([[0.3]]))

    assert labels.tolist() == [0]
    assert shares[0].tolist() == [0.5, 0.5]


def test_k_bounds():
    """Test k larger than the stored rows is rejected."""
    dataset = make_dataset([[0.0], [1.0]], [0, 1])
    with pytest.raises(ParameterError):
        fit_knn(dataset, KNNParams(k=3))
    model = fit_knn(dataset, KNNParams(k=1))
    with pytest.raises(ParameterError):
        kneighbors(model, np.array([[0.0]]), k=3)


def test_query_checks():
    """Test width and scaler fingerprint checks on queries."""
    model = fit_knn(make_dataset([[0.0], [1.0]], [0, 1]), KNNParams(k=1), "abc")
    with pytest.raises(PredictionError):
        predict_knn(model, np.array([[0.0, 1.0]]))
    with pytest.raises(PredictionError):
        predict_knn(model, np.array([[0.0]]), scaler_fingerprint="def")


def test_scaled_model_rejects_unscaled_queries():
    """Test a model fitted with a scaler fingerprint refuses queries without one."""
    scaled = fit_knn(make_dataset([[0.0], [1.0]], [0, 1]), KNNParams(k=1), "abc")
    with pytest.raises(PredictionError, match="no scaler"):
        predict_knn(scaled, np.array([[0.0]]))
    with pytest.raises(PredictionError):
        kneighbors(scaled, np.array([[0.0]]), scaler_fingerprint=None)

    unscaled = fit_knn(make_dataset([[0.0], [1.0]], [0, 1]), KNNParams(k=1))
    with pytest.raises(PredictionError):
        predict_knn(unscaled, np.array([[0.0]]), scaler_fingerprint="abc")
    labels, _ = predict_knn(scaled, np.array([[0.9]]), scaler_fingerprint="abc")
    assert labels.tolist() == [1]


def test_separable_blobs(separable_dataset):
    """Test near-perfect accuracy on well separated classes."""
    model = fit_knn(separable_dataset)
    labels, _ = predict_knn(model, separable_dataset.features)

    assert np.array_equal(labels, separable_dataset.labels)


def test_dict_round_trip(separable_dataset):
    """Test a model survives to_dict/from_dict."""
    model = fit_knn(separable_dataset, KNNParams(k=3, weighting="uniform"))
    restored = KNNModel.from_dict(model.to_dict())

    assert restored.params == model.params
    assert np.array_equal(restored.features, model.features)
