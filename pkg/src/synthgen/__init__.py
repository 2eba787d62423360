"""Seeded synthetic audit-data generation and its validation."""

from .config import SUPPORTED_PAIRS, CorrelationTarget, SynthConfig
from .generator import (
    CopulaParams,
    calibrate,
    generate,
    generate_with_latent,
    oracle_f1,
    oracle_predictions,
)
from .validation import validate_generation

__all__ = [
    "SUPPORTED_PAIRS",
    "CorrelationTarget",
    "SynthConfig",
    "CopulaParams",
    "calibrate",
    "generate",
    "generate_with_latent",
    "oracle_f1",
    "oracle_predictions",
    "validate_generation",
]
