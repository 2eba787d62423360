"""Domain types: audit records, datasets and reports."""

from .dataset import SCHEMA_VERSION, Dataset
from .records import (
    BOOLEAN_FIELDS,
    CATEGORICAL_FIELDS,
    COUNT_FIELDS,
    CSV_COLUMNS,
    FIELD_NAMES,
    FIRMS,
    INDUSTRIES,
    NUMERIC_FIELDS,
    REAL_FIELDS,
    AuditRecord,
    LabelSpec,
)
from .reports import (
    ComparisonTable,
    ConfusionMatrix,
    CorrelationCheck,
    CorrelationMatrix,
    CVReport,
    FeatureImportance,
    FoldResult,
    GenerationReport,
    MetricSummary,
    Metrics,
)

__all__ = [
    "SCHEMA_VERSION",
    "Dataset",
    "AuditRecord",
    "LabelSpec",
    "BOOLEAN_FIELDS",
    "CATEGORICAL_FIELDS",
    "COUNT_FIELDS",
    "CSV_COLUMNS",
    "FIELD_NAMES",
    "FIRMS",
    "INDUSTRIES",
    "NUMERIC_FIELDS",
    "REAL_FIELDS",
    "ComparisonTable",
    "ConfusionMatrix",
    "CorrelationCheck",
    "CorrelationMatrix",
    "CVReport",
    "FeatureImportance",
    "FoldResult",
    "GenerationReport",
    "MetricSummary",
    "Metrics",
]
