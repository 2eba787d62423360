"""Unit tests for record parsing, labeling and dataset assembly."""

import numpy as np
import pytest

from src.data import build_dataset, derive_labels, parse_records, serialize_records
from src.errors import ConsistencyError, DataError, DatasetError, LabelingError, SchemaError
from src.models import LabelSpec
from src.preprocess import EncodingPlan
from tests.conftest import HEADER, make_record

ROW = "2022,PwC,120,18,4,2,Finance,35.5,Yes,52,900,EMEA,Stable"


def test_parse_records():
    """Test direct field mapping of one CSV row."""
    records = parse_records(f"{HEADER}\n{ROW}\n")

    assert len(records) == 1
    record = records[0]
    assert record.total_audit_engagements == 120
    assert record.high_risk_cases == 18
    assert record.ai_used_for_auditing is True
    assert record.employee_workload == 52.0
    assert record.region == "EMEA"


def test_parse_empty_cell_is_missing():
    """Test that an empty cell becomes the missing marker."""
    row = "2022,PwC,120,18,4,2,Finance,35.5,No,,900,EMEA,Stable"
    record = parse_records(f"{HEADER}\n{row}\n")[0]

    assert record.employee_workload is None
    assert record.ai_used_for_auditing is False


def test_parse_header_is_case_insensitive():
    """Test header normalization."""
    header = HEADER.lower().replace("_", " ")
    assert parse_records(f"{header}\n{ROW}\n")[0].firm_name == "PwC"


def test_parse_header_mismatch():
    """Test that missing and extra columns are named."""
    header = HEADER.replace("Market_Value", "Market_Cap")
    with pytest.raises(SchemaError) as exc:
        parse_records(f"{header}\n{ROW}\n")

    assert "Market_Value" in str(exc.value)
    assert "Market_Cap" in str(exc.value)


def test_parse_bad_numeric_cell():
    """Test that an unparsable number carries row and column."""
    row = ROW.replace(",120,", ",many,")
    with pytest.raises(DataError) as exc:
        parse_records(f"{HEADER}\n{ROW}\n{row}\n")

    assert exc.value.row == 1
    assert exc.value.column == "Total_Audit_Engagements"


def test_parse_inconsistent_counts():
    """Test the high-risk consistency check."""
    row = "2022,PwC,40,50,4,2,Finance,35.5,Yes,52,900,EMEA,Stable"
    with pytest.raises(ConsistencyError) as exc:
        parse_records(f"{HEADER}\n{ROW}\n{row}\n")

    assert exc.value.row == 1


def test_serialize_round_trip(synth_records):
    """Test parse(serialize(records)) reproduces the records."""
    records = synth_records[:50] + [make_record(region=None, total_revenue_impact=None)]

    assert parse_records(serialize_records(records)) == records


def test_derive_labels():
    """Test label threshold, zero case and inclusive boundary."""
    records = [
        make_record(total_audit_engagements=100, high_risk_cases=30),
        make_record(total_audit_engagements=100, high_risk_cases=0),
        make_record(total_audit_engagements=100, high_risk_cases=15),
    ]

    assert derive_labels(records, LabelSpec(tau=0.15)).tolist() == [1, 0, 1]


def test_derive_labels_monotone_in_tau(synth_records):
    """Test that raising tau never turns a 0 into a 1."""
    previous = derive_labels(synth_records, LabelSpec(tau=0.05))
    for tau in (0.1, 0.15, 0.3, 0.6):
        current = derive_labels(synth_records, LabelSpec(tau=tau))
        assert np.all(current <= previous)
        previous = current


def test_derive_labels_requires_engagements():
    """Test the labeling error for zero engagements."""
    records = [make_record(), make_record(total_audit_engagements=0, high_risk_cases=0)]
    with pytest.raises(LabelingError) as exc:
        derive_labels(records, LabelSpec())

    assert exc.value.row == 1


def test_build_dataset_column_count():
    """Test 2 numeric + one 4-level one-hot field gives 6 columns."""
    records = [make_record(firm_name=firm) for firm in ("EY", "PwC", "Deloitte")]
    plan = EncodingPlan(
        numeric=["total_audit_engagements", "compliance_violations"],
        boolean=[],
        one_hot=["firm_name"],
        open_vocabulary=[],
        categories={"firm_name": ["Deloitte", "EY", "KPMG", "PwC"]},
    )
    dataset = build_dataset(records, plan, [0, 1, 0])

    assert dataset.features.shape == (3, 6)
    assert dataset.feature_names[2:] == (
        "firm_name=Deloitte",
        "firm_name=EY",
        "firm_name=KPMG",
        "firm_name=PwC",
    )
    assert np.all(dataset.features[:, 2:].sum(axis=1) == 1)


def test_build_dataset_empty():
    """Test the empty-dataset error."""
    with pytest.raises(DatasetError):
        build_dataset([], EncodingPlan(), [])


def test_build_dataset_single_class_flag():
    """Test single-class labels are flagged in metadata."""
    plan = EncodingPlan(
        numeric=["total_audit_engagements"], boolean=[], one_hot=[], open_vocabulary=[]
    )
    dataset = build_dataset([make_record()] * 3, plan, [1, 1, 1])

    assert dataset.metadata["single_class"] is True


def test_build_dataset_residual_missing():
    """Test that a missing value left in the records is rejected."""
    plan = EncodingPlan(numeric=["employee_workload"], boolean=[], one_hot=[], open_vocabulary=[])
    with pytest.raises(DatasetError):
        build_dataset([make_record(), make_record(employee_workload=None)], plan, [0, 1])


def test_build_dataset_derives_history_for_default_plan():
    """Test plain records with the default plan get per-firm history columns."""
    records = [
        make_record(year=2021, total_audit_engagements=120, compliance_violations=4),
        make_record(year=2022, total_audit_engagements=100, fraud_cases_detected=5),
        make_record(year=2022, firm_name="EY", total_audit_engagements=80),
    ]
    dataset = build_dataset(records, EncodingPlan(), [0, 1, 0])

    column = {name: i for i, name in enumerate(dataset.feature_names)}
    history = dataset.features[:, column["historical_violation_ratio"]]
    assert history.tolist() == pytest.approx([0.0, 4 / 120, 0.0])
    assert dataset.features[:, column["fraud_rate"]].tolist() == pytest.approx(
        [2 / 120, 5 / 100, 2 / 80]
    )
    assert not np.isnan(dataset.features).any()
