"""Shared fixtures."""

import numpy as np
import pytest

from src.models import AuditRecord, Dataset
from src.synthgen import SynthConfig, generate

HEADER = (
    "Year,Firm_Name,Total_Audit_Engagements,High_Risk_Cases,Compliance_Violations,"
    "Fraud_Cases_Detected,Industry_Affected,Total_Revenue_Impact,AI_Used_for_Auditing,"
    "Employee_Workload,Market_Value,Region,Financial_Status"
)


def make_record(**overrides) -> AuditRecord:
    values = {
        "year": 2022,
        "firm_name": "PwC",
        "total_audit_engagements": 120,
        "high_risk_cases": 18,
        "compliance_violations": 4,
        "fraud_cases_detected": 2,
        "industry_affected": "Finance",
        "total_revenue_impact": 35.5,
        "ai_used_for_auditing": True,
        "employee_workload": 52.0,
        "market_value": 900.0,
        "region": "EMEA",
        "financial_status": "Stable",
    }
    values.update(overrides)
    return AuditRecord(**values)


def make_dataset(features, labels, names=None) -> Dataset:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    names = names or [f"x{i}" for i in range(features.shape[1])]
    return Dataset(
        features=features,
        feature_names=tuple(names),
        labels=np.asarray(labels),
        group_keys=tuple("g" for _ in range(len(features))),
    )


@pytest.fixture
def record_factory():
    return make_record


@pytest.fixture
def csv_header():
    return HEADER


@pytest.fixture(scope="session")
def synth_records():
    """600 generated records (seed 7)."""
    return generate(SynthConfig(n_records=600), seed=7)


@pytest.fixture
def separable_dataset():
    """Two well separated Gaussian blobs in 3 dimensions, 40 rows per class."""
    rng = np.random.default_rng(3)
    zeros = rng.normal(loc=-2.0, scale=0.5, size=(40, 3))
    ones = rng.normal(loc=2.0, scale=0.5, size=(40, 3))
    features = np.vstack([zeros, ones])
    labels = np.array([0] * 40 + [1] * 40)
    return make_dataset(features, labels)
