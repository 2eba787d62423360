"""Exception hierarchy shared by every module.

Each error carries a short machine token (``code``) and the process exit code the
CLI maps it to: 2 for usage/config problems, 3 for data problems, 4 for training
and convergence problems.
"""

from typing import Optional


class AuditMLError(Exception):
    """Base class for all AuditML errors."""

    code = "error"
    exit_code = 1

    def __init__(
        self,
        message: str,
        *,
        row: Optional[int] = None,
        column: Optional[str] = None,
        fold: Optional[int] = None,
    ):
        super().__init__(message)
        self.message = message
        self.row = row
        self.column = column
        self.fold = fold

    def __str__(self) -> str:
        parts = []
        if self.fold is not None:
            parts.append(f"fold {self.fold}")
        if self.row is not None:
            parts.append(f"row {self.row}")
        if self.column is not None:
            parts.append(f"column {self.column}")
        prefix = ", ".join(parts)
        return f"{prefix}: {self.message}" if prefix else self.message

    def with_fold(self, fold: int) -> "AuditMLError":
        """Return a copy of this error of the same type tagged with a fold index."""
        err = type(self)(self.message, row=self.row, column=self.column, fold=fold)
        err.__cause__ = self
        return err


# Usage and configuration (exit 2)


class UsageError(AuditMLError):
    code = "usage"
    exit_code = 2


class ConfigError(AuditMLError):
    code = "config"
    exit_code = 2


class ModelVersionError(AuditMLError):
    code = "version"
    exit_code = 2


# Data (exit 3)


class DataError(AuditMLError):
    code = "data"
    exit_code = 3


class SchemaError(DataError):
    code = "schema"


class ConsistencyError(DataError):
    code = "consistency"


class LabelingError(DataError):
    code = "labeling"


class DatasetError(DataError):
    code = "dataset"


class ImputationError(DataError):
    code = "imputation"


class EncodingError(DataError):
    code = "encoding"


class TransformError(DataError):
    code = "transform"


class WindowError(DataError):
    code = "window"


class ResamplingError(DataError):
    code = "resampling"


class PredictionError(DataError):
    code = "prediction"


class GenerationError(DataError):
    code = "generation"


class CorruptionError(DataError):
    code = "corruption"


# Training (exit 4)


class TrainingError(AuditMLError):
    code = "training"
    exit_code = 4


class ParameterError(TrainingError):
    code = "parameter"


class WeightingError(TrainingError):
    code = "weighting"


class StratificationError(TrainingError):
    code = "stratification"


class ConvergenceError(TrainingError):
    code = "convergence"


class ImportanceError(TrainingError):
    code = "importance"
