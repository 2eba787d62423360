"""Versioned, checksummed JSON model files."""

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import CorruptionError, ModelVersionError
from src.learners.base import FittedModel
from src.models.records import LabelSpec
from src.preprocess.pipeline import FeaturePipeline

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class ModelFile(BaseModel):
    """On-disk form of a trained model and everything needed to score new records."""

    model_config = ConfigDict(extra="forbid")

    format_version: int = FORMAT_VERSION
    kind: str = Field(..., description="rf | svm | knn | constant")
    feature_names: list[str]
    scaler_fingerprint: Optional[str] = None
    label: LabelSpec
    pipeline: dict[str, Any] = Field(..., description="Fitted FeaturePipeline state")
    model: dict[str, Any] = Field(..., description="FittedModel payload")
    seed: int
    config_hash: str
    checksum: str = ""


@dataclass(frozen=True)
class TrainedModel:
    """A loaded model file: fitted model, preprocessing and provenance."""

    model: FittedModel
    pipeline: FeaturePipeline
    label: LabelSpec
    seed: int
    config_hash: str


def _canonical(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _checksum(payload: dict[str, Any]) -> str:
    body = {k: v for k, v in payload.items() if k != "checksum"}
    return hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()


def save_model(trained: TrainedModel, path: Path) -> Path:
    """Write ``trained`` as canonical JSON; identical models give identical bytes."""
    fitted = trained.model
    document = ModelFile(
        kind=fitted.spec.kind,
        feature_names=list(fitted.feature_names),
        scaler_fingerprint=fitted.scaler.fingerprint if fitted.scaler is not None else None,
        label=trained.label,
        pipeline=trained.pipeline.model_dump(mode="json"),
        model=fitted.to_dict(),
        seed=trained.seed,
        config_hash=trained.config_hash,
    )
    payload = document.model_dump(mode="json")
    payload["checksum"] = _checksum(payload)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_canonical(payload) + "\n", encoding="utf-8")
    logger.info(f"Saved {document.kind} model to {path}")
    return path


def load_model(path: Path) -> TrainedModel:
    """Read and verify a model file.

    Raises:
        ModelVersionError: ``format_version`` differs from the supported version
        CorruptionError: unreadable, truncated or checksum-mismatched file
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptionError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise CorruptionError(f"model file {path} is not a JSON object")

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"model file {path} has format_version {version}; "
            f"this build reads format_version {FORMAT_VERSION}"
        )
    if payload.get("checksum") != _checksum(payload):
        raise CorruptionError(f"checksum mismatch in model file {path}")

    try:
        document = ModelFile(**payload)
        fitted = FittedModel.from_dict(document.model)
        pipeline = FeaturePipeline.model_validate(document.pipeline)
    except (ValidationError, KeyError, TypeError, ValueError) as exc:
        raise CorruptionError(f"invalid model payload in {path}: {exc}") from exc
    return TrainedModel(
        model=fitted,
        pipeline=pipeline,
        label=document.label,
        seed=document.seed,
        config_hash=document.config_hash,
    )
