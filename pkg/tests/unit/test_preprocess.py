"""Unit tests for cleaning, encoding, history features, windows, scaling and SMOTE."""

import math

import numpy as np
import pytest

from src.data import derive_labels
from src.errors import (
    EncodingError,
    ImputationError,
    ParameterError,
    ResamplingError,
    TrainingError,
    TransformError,
    WindowError,
)
from src.learners import ModelSpec, fit_model
from src.models import LabelSpec
from src.preprocess import (
    OTHER,
    ClipRule,
    EncodingPlan,
    FeaturePipeline,
    WindowSpec,
    apply_scaler,
    clip_outliers,
    derive_features,
    encode,
    fit_scaler,
    impute,
    smote,
    windowize,
)
from src.preprocess.features import window_count
from src.preprocess.smote import minority_neighbors
from tests.conftest import make_dataset, make_record

NUMERIC_ONLY = {"boolean": [], "one_hot": [], "open_vocabulary": []}


def test_impute_median():
    """Test numeric imputation with the median."""
    records = [make_record(employee_workload=v) for v in (40.0, None, 60.0)]
    result = impute(records)

    assert result.records[1].employee_workload == 50.0
    assert result.filled == {"employee_workload": 1}
    assert result.statistics["employee_workload"] == 50.0


def test_impute_mode():
    """Test categorical imputation with the mode."""
    records = [make_record(region=v) for v in ("EMEA", None, "EMEA", "APAC")]

    assert impute(records).records[1].region == "EMEA"


def test_impute_identity():
    """Test that complete records are returned unchanged."""
    records = [make_record(), make_record(year=2023)]
    result = impute(records)

    assert result.records == records
    assert result.filled == {}


def test_impute_fully_missing_column():
    """Test the imputation error for an all-missing field."""
    records = [make_record(market_value=None), make_record(market_value=None)]
    with pytest.raises(ImputationError) as exc:
        impute(records)

    assert exc.value.column == "market_value"


def test_clip_outliers_quantiles():
    """Test midpoint quantile bounds and interior values."""
    records = [make_record(employee_workload=float(v)) for v in range(1, 101)]
    rule = ClipRule(q_low=0.01, q_high=0.99, fields=["employee_workload"])
    result = clip_outliers(records, rule)
    values = [r.employee_workload for r in result.records]

    assert values[0] == pytest.approx(1.5)
    assert values[-1] == pytest.approx(99.5)
    assert values[1:-1] == [float(v) for v in range(2, 100)]
    assert result.clipped == {"employee_workload": 2}


def test_clip_outliers_identity_and_constant():
    """Test identity bounds and constant fields."""
    records = [make_record(employee_workload=float(v), market_value=7.0) for v in range(1, 21)]
    rule = ClipRule(q_low=0.0, q_high=1.0, fields=["employee_workload", "market_value"])
    result = clip_outliers(records, rule)

    assert result.records == records
    assert result.clipped == {"employee_workload": 0, "market_value": 0}


def test_clip_rule_order():
    """Test that q_low must be below q_high."""
    with pytest.raises(ValueError):
        ClipRule(q_low=0.5, q_high=0.5)


def test_encode_one_hot():
    """Test one one-hot column per firm with exactly one 1 per row."""
    records = [make_record(firm_name=f) for f in ("EY", "PwC", "Deloitte", "KPMG", "EY")]
    plan = EncodingPlan(numeric=[], boolean=[], one_hot=["firm_name"], open_vocabulary=[])
    encoded = encode(records, plan)

    assert encoded.feature_names == (
        "firm_name=Deloitte",
        "firm_name=EY",
        "firm_name=KPMG",
        "firm_name=PwC",
    )
    assert np.all(encoded.matrix.sum(axis=1) == 1)


def test_encode_bins_and_booleans():
    """Test left-inclusive binning and boolean mapping."""
    records = [make_record(employee_workload=52.0, ai_used_for_auditing=True)]
    plan = EncodingPlan(
        numeric=[],
        one_hot=[],
        open_vocabulary=[],
        bins={"employee_workload": [0, 40, 55, math.inf]},
    )
    encoded = encode(records, plan)

    assert encoded.feature_names == ("ai_used_for_auditing", "employee_workload")
    assert encoded.matrix[0].tolist() == [1.0, 1.0]


def test_encode_rejects_non_monotone_edges():
    """Test the plan error for decreasing edges."""
    with pytest.raises(ValueError):
        EncodingPlan(bins={"employee_workload": [0, 55, 40]})


def test_encode_unseen_category():
    """Test the other column for open fields and the error for closed ones."""
    fitted = encode(
        [make_record(region="EMEA"), make_record(region="APAC")],
        EncodingPlan(numeric=[], boolean=[], one_hot=["region"], open_vocabulary=["region"]),
    )
    replay = encode([make_record(region="Mars")], fitted.plan)

    assert replay.feature_names[-1] == f"region={OTHER}"
    assert replay.matrix[0].tolist() == [0.0, 0.0, 1.0]

    closed = EncodingPlan(
        numeric=[],
        boolean=[],
        one_hot=["firm_name"],
        open_vocabulary=[],
        categories={"firm_name": ["EY"]},
    )
    with pytest.raises(EncodingError):
        encode([make_record(firm_name="PwC")], closed)


def test_derive_features_history():
    """Test cumulative prior-year ratio, first-year zeros and fraud rate."""
    records = [
        make_record(year=2020, compliance_violations=2, total_audit_engagements=100),
        make_record(
            year=2021,
            compliance_violations=4,
            total_audit_engagements=120,
            fraud_cases_detected=3,
        ),
    ]
    derived = derive_features(records)

    assert derived["historical_violation_ratio"].tolist() == [0.0, 0.02]
    assert derived["audit_frequency_change"].tolist() == [0.0, 20.0]
    assert derived["fraud_rate"].iloc[1] == pytest.approx(0.025)


def test_derive_features_uses_prior_years_only():
    """Test that changing a later year leaves earlier rows untouched."""
    base = [make_record(year=2020 + i, compliance_violations=i) for i in range(4)]
    changed = base[:2] + [
        make_record(
            year=2022, compliance_violations=40, total_audit_engagements=10, high_risk_cases=1
        ),
        base[3],
    ]
    before, after = derive_features(base), derive_features(changed)

    assert before.iloc[:3]["historical_violation_ratio"].tolist() == (
        after.iloc[:3]["historical_violation_ratio"].tolist()
    )


def test_derive_features_trend_fields():
    """Test generic trend columns for configured numeric fields."""
    records = [
        make_record(year=2020, market_value=100.0),
        make_record(year=2021, market_value=130.0),
    ]
    derived = derive_features(records, trend_fields=["market_value"])

    assert derived["market_value_trend"].tolist() == [0.0, 30.0]


def _firm_history(length: int):
    return [
        make_record(year=2020 + i, high_risk_cases=10 + i * i, total_audit_engagements=100)
        for i in range(length)
    ]


def test_windowize_sample_count():
    """Test four samples from six consecutive years with W=3."""
    records = _firm_history(6)
    plan = EncodingPlan(numeric=["high_risk_cases"], **NUMERIC_ONLY)
    dataset = windowize(records, WindowSpec(window_length=3), [0] * 6, plan)

    assert dataset.n_rows == 4
    assert dataset.row_index.tolist() == [2, 3, 4, 5]


def test_windowize_layout():
    """Test lagged deltas for the 2022 sample."""
    records = _firm_history(3)
    plan = EncodingPlan(numeric=["high_risk_cases"], **NUMERIC_ONLY)
    dataset = windowize(records, WindowSpec(window_length=3), [0, 0, 1], plan)
    row = dict(zip(dataset.feature_names, dataset.features[0]))

    assert row["high_risk_cases"] == 14
    assert row["high_risk_cases_delta1"] == 14 - 11
    assert row["high_risk_cases_delta2"] == 11 - 10
    assert row["high_risk_cases_lag2"] == 10
    assert dataset.labels.tolist() == [1]


def test_windowize_short_run(caplog):
    """Test that a run shorter than the window yields zero samples and a warning."""
    plan = EncodingPlan(numeric=["high_risk_cases"], **NUMERIC_ONLY)
    with caplog.at_level("WARNING", logger="src.preprocess.features"):
        dataset = windowize(_firm_history(2), WindowSpec(window_length=3), [0, 0], plan)

    assert dataset.n_rows == 0
    assert dataset.empty
    assert dataset.metadata["no_samples"]
    assert dataset.metadata["short_runs"] == 1
    assert dataset.feature_names[-2:] == ("high_risk_cases_lag2", "high_risk_cases_delta2")
    assert "shorter than W=3" in caplog.text
    with pytest.raises(TrainingError, match="no rows"):
        fit_model(ModelSpec(name="rf", kind="rf"), dataset)


def test_windowize_duplicate_years():
    """Test that two rows for one firm-year are rejected."""
    plan = EncodingPlan(numeric=["high_risk_cases"], **NUMERIC_ONLY)
    records = [make_record(year=2021), make_record(year=2021)]
    with pytest.raises(WindowError):
        windowize(records, WindowSpec(window_length=2), [0, 1], plan)


def test_windowize_counts_match_formula():
    """Test sample counts against the closed form for every run length."""
    plan = EncodingPlan(numeric=["high_risk_cases"], **NUMERIC_ONLY)
    for length in range(2, 7):
        for w in range(2, 7):
            for stride in range(1, 4):
                expected = window_count(length, w, stride)
                assert expected == max(0, (length - w) // stride + 1)
                if expected == 0:
                    continue
                spec = WindowSpec(window_length=w, stride=stride)
                dataset = windowize(_firm_history(length), spec, [0] * length, plan)
                assert dataset.n_rows == expected


def test_window_spec_bounds():
    """Test that a window of one year is rejected."""
    with pytest.raises(ValueError):
        WindowSpec(window_length=1)


def test_standard_scaler():
    """Test population statistics and zero-variance handling."""
    dataset = make_dataset([[2.0, 5.0], [4.0, 5.0]], [0, 1])
    transform = fit_scaler(dataset, "standard_scale")

    assert transform.center == [3.0, 5.0]
    assert transform.spread == [1.0, 0.0]
    scaled = apply_scaler(transform, dataset)
    assert scaled.features[:, 0].tolist() == [-1.0, 1.0]
    assert scaled.features[:, 1].tolist() == [0.0, 0.0]


def test_min_max_scaler():
    """Test min-max statistics and the [0, 1] range on fit data."""
    dataset = make_dataset([[0.0], [10.0], [5.0]], [0, 1, 0])
    transform = fit_scaler(dataset, "min_max_scale")

    assert (transform.center, transform.spread) == ([0.0], [10.0])
    assert apply_scaler(transform, dataset).features[:, 0].tolist() == [0.0, 1.0, 0.5]


def test_standard_scaler_on_fit_data(separable_dataset):
    """Test mean 0 and std 1 after scaling the fit data."""
    scaled = apply_scaler(fit_scaler(separable_dataset, "standard_scale"), separable_dataset)

    assert np.allclose(scaled.features.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(scaled.features.std(axis=0), 1.0, atol=1e-9)


def test_scaler_schema_mismatch():
    """Test the transform error for different feature names."""
    transform = fit_scaler(make_dataset([[1.0], [2.0]], [0, 1], names=["a"]), "standard_scale")
    with pytest.raises(TransformError) as exc:
        apply_scaler(transform, make_dataset([[1.0], [2.0]], [0, 1], names=["b"]))

    assert "a" in str(exc.value)


def test_smote_segment_two_points():
    """Test that the synthetic point lies on the segment between the two minority points."""
    dataset = make_dataset(
        [[0.0, 0.0], [1.0, 1.0], [5.0, 5.0], [6.0, 6.0], [7.0, 7.0]], [1, 1, 0, 0, 0]
    )
    resampled = smote(dataset, k=1, target_ratio=1.0, seed=0)

    assert resampled.n_rows == 6
    x, y = resampled.features[-1]
    assert x == y
    assert 0.0 <= x <= 1.0
    assert resampled.is_synthetic.tolist() == [False] * 5 + [True]
    assert resampled.labels[-1] == 1


def test_smote_count():
    """Test that 10 majority and 3 minority rows gain 7 synthetic rows."""
    rng = np.random.default_rng(0)
    dataset = make_dataset(rng.normal(size=(13, 2)), [0] * 10 + [1] * 3)
    resampled = smote(dataset, k=2, target_ratio=1.0, seed=1)

    assert resampled.n_rows - dataset.n_rows == 7
    assert np.array_equal(resampled.features[:13], dataset.features)


def test_smote_balanced_is_noop():
    """Test that an already balanced dataset is returned unchanged."""
    dataset = make_dataset([[0.0], [1.0], [2.0], [3.0]], [0, 1, 0, 1])

    assert smote(dataset, k=1, target_ratio=1.0, seed=0) is dataset


def test_smote_errors():
    """Test the resampling and parameter errors."""
    with pytest.raises(ResamplingError):
        smote(make_dataset([[0.0], [1.0], [2.0]], [0, 0, 1]), k=1, target_ratio=1.0, seed=0)
    with pytest.raises(ParameterError):
        smote(make_dataset([[0.0], [1.0], [2.0], [3.0], [4.0]], [0, 0, 0, 1, 1]), 2, 1.0, 0)


def test_smote_points_lie_on_neighbour_segments():
    """Test segment membership of every synthetic point by brute force."""
    rng = np.random.default_rng(11)
    features = rng.normal(size=(200, 3))
    labels = np.array([1] * 30 + [0] * 170)
    k = 4
    resampled = smote(make_dataset(features, labels), k=k, target_ratio=1.0, seed=5)
    minority = features[labels == 1]
    neighbours = minority_neighbors(minority, k)

    for point in resampled.features[200:]:
        found = False
        for i, base in enumerate(minority):
            for j in neighbours[i]:
                direction = minority[j] - base
                u = np.dot(point - base, direction) / np.dot(direction, direction)
                if -1e-12 <= u <= 1 + 1e-12 and np.allclose(base + u * direction, point):
                    found = True
                    break
            if found:
                break
        assert found


def test_feature_pipeline_replay(synth_records):
    """Test that transform replays the fitted stages exactly."""
    labels = derive_labels(synth_records, LabelSpec())
    prepared = FeaturePipeline().fit_transform(synth_records, labels)
    replayed = prepared.pipeline.transform(synth_records, labels)

    assert prepared.pipeline.fitted
    assert replayed.feature_names == prepared.dataset.feature_names
    assert np.array_equal(replayed.features, prepared.dataset.features)
    assert "high_risk_cases" not in prepared.dataset.feature_names
    assert "historical_violation_ratio" in prepared.dataset.feature_names


def test_feature_pipeline_round_trips_through_json(synth_records):
    """Test that a fitted pipeline survives model_dump / model_validate."""
    labels = derive_labels(synth_records, LabelSpec())
    prepared = FeaturePipeline().fit_transform(synth_records, labels)
    restored = FeaturePipeline.model_validate(prepared.pipeline.model_dump(mode="json"))

    assert np.array_equal(restored.transform(synth_records).features, prepared.dataset.features)


def test_feature_pipeline_unfitted():
    """Test the transform error before fitting."""
    with pytest.raises(TransformError):
        FeaturePipeline().transform([make_record()])
