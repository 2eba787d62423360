"""Unit tests for model specs and fitted-model bundling."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import ParameterError, PredictionError, TrainingError, TransformError
from src.learners import (
    ConstantModel,
    FittedModel,
    Forest,
    KNNModel,
    ModelSpec,
    fit_model,
    select_columns,
)
from tests.conftest import make_dataset


def test_model_spec_defaults():
    """Test default scalers per kind and parameter validation."""
    assert ModelSpec(name="rf", kind="rf").scaler_kind is None
    assert ModelSpec(name="svm", kind="svm").scaler_kind == "standard_scale"
    assert ModelSpec(name="knn", kind="knn").scaler_kind == "min_max_scale"
    assert ModelSpec(name="knn", kind="knn", scaler="none").scaler_kind is None
    with pytest.raises(ValidationError):
        ModelSpec(name="svm", kind="svm", params={"gama": 1.0})
    with pytest.raises(ValidationError):
        ModelSpec(name="c", kind="constant", params={"k": 1})


def test_fit_model_pairs_scaler(separable_dataset):
    """Test scaler fitted on training rows and reused at prediction."""
    spec = ModelSpec(name="svm", kind="svm", params={"C": 1.0})
    model = fit_model(spec, separable_dataset, seed=1)

    assert model.scaler.kind == "standard_scale"
    assert model.estimator.scaler_fingerprint == model.scaler.fingerprint
    assert model.training_fingerprint == separable_dataset.fingerprint()
    labels, _ = model.predict(separable_dataset)
    assert np.array_equal(labels, separable_dataset.labels)


def test_predict_rejects_other_schema(separable_dataset):
    """Test feature-schema checks with and without a scaler."""
    other = make_dataset(separable_dataset.features, separable_dataset.labels, ["a", "b", "c"])
    knn = fit_model(ModelSpec(name="knn", kind="knn"), separable_dataset)
    rf = fit_model(ModelSpec(name="rf", kind="rf", params={"n_estimators": 3}), separable_dataset)

    with pytest.raises(TransformError):
        knn.predict(other)
    with pytest.raises(PredictionError):
        rf.predict(other)


def test_knn_drops_indicator_columns(separable_dataset):
    """Test KNN trains on non-indicator columns but predicts from the full schema."""
    flip = (np.arange(separable_dataset.n_rows) % 2).astype(float)
    names = ["x0", "x1", "x2", "firm_name=EY", "firm_name=PwC"]
    features = np.column_stack([separable_dataset.features, flip, 1.0 - flip])
    dataset = make_dataset(features, separable_dataset.labels, names)

    assert select_columns(names, "numeric") == [0, 1, 2]
    assert select_columns(names, "all") == [0, 1, 2, 3, 4]
    knn = fit_model(ModelSpec(name="knn", kind="knn"), dataset)
    assert knn.feature_names == tuple(names)
    assert knn.used_feature_names == ("x0", "x1", "x2")
    assert knn.scaler.feature_names == ["x0", "x1", "x2"]
    labels, _ = knn.predict(dataset)
    assert np.array_equal(labels, dataset.labels)

    wide = fit_model(ModelSpec(name="knn", kind="knn", columns="all"), dataset)
    assert wide.used_feature_names == tuple(names)
    with pytest.raises(TransformError):
        knn.predict(separable_dataset)
    only_indicators = make_dataset(features[:, 3:], dataset.labels, names[3:])
    with pytest.raises(ParameterError):
        fit_model(ModelSpec(name="knn", kind="knn"), only_indicators)


def test_fit_model_with_smote():
    """Test SMOTE rows are counted and balance the classes."""
    rng = np.random.default_rng(0)
    features = np.vstack([rng.normal(-1, 0.3, (30, 2)), rng.normal(1, 0.3, (6, 2))])
    dataset = make_dataset(features, [0] * 30 + [1] * 6)
    spec = ModelSpec(name="knn", kind="knn", smote=True, smote_k=3)
    model = fit_model(spec, dataset, seed=2)

    assert model.smote_rows == 24
    assert isinstance(model.estimator, KNNModel)
    assert len(model.estimator.labels) == 60


def test_constant_model():
    """Test the majority-class baseline."""
    dataset = make_dataset([[0.0], [1.0], [2.0]], [1, 1, 0])
    model = fit_model(ModelSpec(name="constant", kind="constant"), dataset)

    assert model.estimator == ConstantModel(label=1)
    labels, scores = model.predict(dataset)
    assert labels.tolist() == [1, 1, 1]
    assert scores.tolist() == [1.0, 1.0, 1.0]


def test_fit_model_rejects_single_class():
    """Test the single-class error names the spec."""
    with pytest.raises(TrainingError) as exc:
        fit_model(ModelSpec(name="my-rf", kind="rf"), make_dataset([[0.0], [1.0]], [0, 0]))

    assert "my-rf" in str(exc.value)


def test_seed_override(separable_dataset):
    """Test the seed argument replaces the learner's own seed."""
    spec = ModelSpec(name="rf", kind="rf", params={"n_estimators": 4, "seed": 0})
    model = fit_model(spec, separable_dataset, seed=9)

    assert isinstance(model.estimator, Forest)
    assert model.estimator.params.seed == 9


def test_fitted_model_dict_round_trip(separable_dataset):
    """Test every kind survives to_dict/from_dict with identical predictions."""
    for kind in ("rf", "svm", "knn", "constant"):
        params = {"n_estimators": 3} if kind == "rf" else {}
        model = fit_model(ModelSpec(name=kind, kind=kind, params=params), separable_dataset)
        restored = FittedModel.from_dict(model.to_dict())

        for a, b in zip(model.predict(separable_dataset), restored.predict(separable_dataset)):
            assert np.array_equal(a, b)
