"""Report writers: CSV and JSON side by side, plus the run manifest."""

import hashlib
import json
import logging
import platform
from pathlib import Path
from typing import Any, Iterable, Optional

import joblib
import numpy as np
import pandas as pd
import pydantic
import scipy

from src import __version__
from src.evaluation.figures import FigureAggregates
from src.models.reports import ComparisonTable, CorrelationMatrix, CVReport, FeatureImportance

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


def file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class ReportWriter:
    """Writes report files under one output directory and remembers what it wrote."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _track(self, path: Path) -> Path:
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    def text(self, name: str, content: str) -> Path:
        path = self.path(name)
        path.write_text(content, encoding="utf-8")
        return self._track(path)

    def json(self, name: str, payload: Any) -> Path:
        if isinstance(payload, pydantic.BaseModel):
            payload = payload.model_dump(mode="json")
        return self.text(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return self._track(path)

    def adopt(self, path: Path) -> Path:
        """Track a file written elsewhere (model files) for the manifest."""
        return self._track(Path(path))

    def manifest(
        self,
        command: str,
        config_hash: str,
        seed: int,
        inputs: Iterable[Path] = (),
        extra: Optional[dict[str, Any]] = None,
    ) -> Path:
        """Record inputs, outputs, config hash, seed and library versions of this run."""
        payload = {
            "command": command,
            "config_hash": config_hash,
            "seed": seed,
            "inputs": {str(p): file_digest(p) for p in inputs},
            "outputs": {p.name: file_digest(p) for p in self.written},
            "versions": {
                "auditml": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
                "joblib": joblib.__version__,
                "pydantic": pydantic.VERSION,
            },
            **(extra or {}),
        }
        path = self.path("manifest.json")
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")
        return path


COUNT_COLUMNS = ("n_train", "n_test", "tp", "fp", "fn", "tn")


def cv_frame(report: CVReport) -> pd.DataFrame:
    """One row per fold, then ``mean`` and ``std`` summary rows.

    Summary rows carry the metric aggregates only; their count columns are empty.
    """
    rows: list[dict[str, Any]] = [
        {
            "model": report.model_name,
            "fold": str(f.fold),
            "n_train": f.n_train,
            "n_test": f.n_test,
            "tp": f.confusion.tp,
            "fp": f.confusion.fp,
            "fn": f.confusion.fn,
            "tn": f.confusion.tn,
            **f.metrics.model_dump(),
        }
        for f in report.folds
    ]
    for statistic in ("mean", "std"):
        row: dict[str, Any] = {"model": report.model_name, "fold": statistic}
        for metric in ("accuracy", "precision", "recall", "f1"):
            row[metric] = getattr(getattr(report, metric), statistic)
        rows.append(row)
    frame = pd.DataFrame(rows, columns=list(rows[0]))
    return frame.astype({name: "Int64" for name in COUNT_COLUMNS})


def comparison_frame(table: ComparisonTable) -> pd.DataFrame:
    """One row per model, best mean F1 first."""
    rows = []
    for rank, report in enumerate(table.rows, start=1):
        row: dict[str, Any] = {"rank": rank, "model": report.model_name, "kind": report.model_kind}
        for metric in ("f1", "accuracy", "recall", "precision"):
            summary = getattr(report, metric)
            row[f"{metric}_mean"] = summary.mean
            row[f"{metric}_std"] = summary.std
        rows.append(row)
    return pd.DataFrame(rows)


def importance_frame(importance: FeatureImportance) -> pd.DataFrame:
    frame = pd.DataFrame(
        {"feature": importance.feature_names, "importance": importance.importances}
    )
    if importance.stds is not None:
        frame["std"] = importance.stds
    return frame.sort_values(
        ["importance", "feature"], ascending=[False, True], kind="mergesort"
    ).reset_index(drop=True)


def correlation_frame(matrix: CorrelationMatrix) -> pd.DataFrame:
    """Square matrix with a leading ``variable`` column; undefined entries are empty."""
    frame = pd.DataFrame(matrix.values, columns=matrix.names, dtype=np.float64)
    frame.insert(0, "variable", matrix.names)
    return frame


def write_figures(writer: ReportWriter, aggregates: FigureAggregates) -> None:
    writer.csv("high_risk_by_firm_year.csv", aggregates.high_risk_by_firm_year)
    writer.csv("revenue_by_firm_industry.csv", aggregates.revenue_by_firm_industry)
