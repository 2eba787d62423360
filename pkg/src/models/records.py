"""Audit-record schema and label specification."""

from typing import Iterable, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

FIRMS = ("Deloitte", "EY", "KPMG", "PwC")
INDUSTRIES = ("Finance", "Healthcare", "Retail", "Tech")
YEAR_RANGE = (2020, 2025)

# CSV header names, in file order.
CSV_COLUMNS = (
    "Year",
    "Firm_Name",
    "Total_Audit_Engagements",
    "High_Risk_Cases",
    "Compliance_Violations",
    "Fraud_Cases_Detected",
    "Industry_Affected",
    "Total_Revenue_Impact",
    "AI_Used_for_Auditing",
    "Employee_Workload",
    "Market_Value",
    "Region",
    "Financial_Status",
)

# Record attribute name for each CSV column.
FIELD_NAMES = tuple(column.lower() for column in CSV_COLUMNS)

COUNT_FIELDS = (
    "total_audit_engagements",
    "high_risk_cases",
    "compliance_violations",
    "fraud_cases_detected",
)
REAL_FIELDS = ("total_revenue_impact", "employee_workload", "market_value")
NUMERIC_FIELDS = ("year",) + COUNT_FIELDS + REAL_FIELDS
BOOLEAN_FIELDS = ("ai_used_for_auditing",)
CATEGORICAL_FIELDS = ("firm_name", "industry_affected", "region", "financial_status")

Firm = Literal["EY", "PwC", "Deloitte", "KPMG"]
Industry = Literal["Finance", "Tech", "Retail", "Healthcare"]


class AuditRecord(BaseModel):
    """One firm-year audit row.

    ``None`` is the missing marker for every optional field; numeric sentinels are
    never used.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    year: int = Field(..., ge=YEAR_RANGE[0], le=YEAR_RANGE[1], description="Audit report year")
    firm_name: Firm = Field(..., description="Firm conducting the audit")
    total_audit_engagements: Optional[int] = Field(None, ge=0)
    high_risk_cases: Optional[int] = Field(None, ge=0)
    compliance_violations: Optional[int] = Field(None, ge=0)
    fraud_cases_detected: Optional[int] = Field(None, ge=0)
    industry_affected: Optional[Industry] = None
    total_revenue_impact: Optional[float] = Field(None, ge=0, description="Millions USD")
    ai_used_for_auditing: Optional[bool] = None
    employee_workload: Optional[float] = Field(None, gt=0, description="Hours per week")
    market_value: Optional[float] = Field(None, ge=0, description="Millions USD")
    region: Optional[str] = None
    financial_status: Optional[str] = None

    @model_validator(mode="after")
    def _high_risk_within_engagements(self) -> "AuditRecord":
        if (
            self.high_risk_cases is not None
            and self.total_audit_engagements is not None
            and self.high_risk_cases > self.total_audit_engagements
        ):
            raise ValueError("high_risk_cases exceeds total_audit_engagements")
        return self

    def missing_fields(self) -> list[str]:
        """Names of fields holding the missing marker."""
        return [name for name in FIELD_NAMES if getattr(self, name) is None]


class LabelSpec(BaseModel):
    """Binary high-risk label: risk percentage at or above ``tau``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau: float = Field(0.15, gt=0.0, lt=1.0, description="Risk-percentage cutoff (inclusive)")
    positive_class_name: str = Field("high_risk", description="Name of label 1")


def records_to_frame(records: Iterable[AuditRecord]) -> pd.DataFrame:
    """Records as a DataFrame with one column per record field (missing -> NaN/None)."""
    return pd.DataFrame([r.model_dump() for r in records], columns=list(FIELD_NAMES))
