"""Unit tests for data models."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import DatasetError
from src.models import (
    AuditRecord,
    ComparisonTable,
    ConfusionMatrix,
    CVReport,
    FoldResult,
    LabelSpec,
    Metrics,
)
from tests.conftest import make_dataset, make_record


def test_audit_record():
    """Test AuditRecord with all fields."""
    record = make_record()

    assert record.total_audit_engagements == 120
    assert record.high_risk_cases == 18
    assert record.missing_fields() == []


def test_audit_record_optional_fields():
    """Test that optional fields default to the missing marker."""
    record = AuditRecord(year=2021, firm_name="EY")

    assert record.employee_workload is None
    assert "employee_workload" in record.missing_fields()
    assert "year" not in record.missing_fields()


def test_audit_record_rejects_inconsistent_counts():
    """Test that high-risk cases may not exceed engagements."""
    with pytest.raises(ValidationError):
        make_record(total_audit_engagements=40, high_risk_cases=50)


def test_audit_record_enumerations():
    """Test year range and firm enumeration."""
    with pytest.raises(ValidationError):
        make_record(year=2019)
    with pytest.raises(ValidationError):
        make_record(firm_name="Acme")


def test_label_spec():
    """Test LabelSpec defaults and bounds."""
    assert LabelSpec().tau == 0.15
    with pytest.raises(ValidationError):
        LabelSpec(tau=1.0)
    with pytest.raises(ValidationError):
        LabelSpec(tau=0.0)


def test_dataset_invariants():
    """Test that Dataset validates shapes, labels and finiteness."""
    dataset = make_dataset([[1.0, 2.0], [3.0, 4.0]], [0, 1])
    assert dataset.n_rows == 2
    assert dataset.n_features == 2
    assert not dataset.single_class
    assert dataset.class_counts() == (1, 1)

    with pytest.raises(DatasetError):
        make_dataset([[1.0, np.nan], [3.0, 4.0]], [0, 1])
    with pytest.raises(DatasetError):
        make_dataset([[1.0], [2.0]], [0, 2])
    with pytest.raises(DatasetError):
        make_dataset([[1.0], [2.0]], [0])


def test_dataset_single_class_flag():
    """Test that a single-class dataset is flagged, not rejected."""
    dataset = make_dataset([[1.0], [2.0], [3.0]], [1, 1, 1])

    assert dataset.single_class
    assert dataset.metadata["single_class"] is True


def test_dataset_is_immutable():
    """Test that feature arrays are read-only."""
    dataset = make_dataset([[1.0], [2.0]], [0, 1])

    with pytest.raises(ValueError):
        dataset.features[0, 0] = 5.0


def test_dataset_subset_and_fingerprint():
    """Test subset ordering and fingerprint stability."""
    dataset = make_dataset([[1.0], [2.0], [3.0]], [0, 1, 0])
    subset = dataset.subset([2, 0])

    assert subset.features[:, 0].tolist() == [3.0, 1.0]
    assert subset.row_index.tolist() == [2, 0]
    assert dataset.fingerprint() == make_dataset([[1.0], [2.0], [3.0]], [0, 1, 0]).fingerprint()
    assert dataset.fingerprint() != subset.fingerprint()


def _report(name, f1_values):
    folds = [
        FoldResult(
            fold=i,
            n_train=8,
            n_test=2,
            confusion=ConfusionMatrix(tp=1, fp=0, fn=0, tn=1),
            metrics=Metrics(accuracy=f1, precision=f1, recall=f1, f1=f1),
            wall_time=1.5,
        )
        for i, f1 in enumerate(f1_values)
    ]
    return CVReport.from_folds(name, "rf", 42, "digest", folds)


def test_cv_report_summary():
    """Test mean and population std over folds."""
    report = _report("rf", [0.8, 0.9, 1.0])

    assert report.n_folds == 3
    assert report.f1.mean == pytest.approx(0.9)
    assert report.f1.std == pytest.approx(np.std([0.8, 0.9, 1.0]))


def test_fold_wall_time_not_serialized():
    """Test that wall time stays out of serialized reports."""
    report = _report("rf", [0.8, 0.9])

    assert "wall_time" not in report.model_dump_json()
    assert report.folds[0].wall_time == 1.5


def test_comparison_table_ranking():
    """Test ranking by mean F1, ties broken by name."""
    table = ComparisonTable(
        rows=[_report("knn", [0.7]), _report("svm", [0.9]), _report("rf", [0.9])]
    )

    assert table.ranking == ["rf", "svm", "knn"]
