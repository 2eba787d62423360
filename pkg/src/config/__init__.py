"""Pipeline configuration and the config-file loader."""

from .settings import (
    DataSettings,
    EvalSettings,
    OutputSettings,
    PipelineConfig,
    RuntimeSettings,
    SweepSettings,
)
from .loader import load_config, read_config_text

__all__ = [
    "DataSettings",
    "EvalSettings",
    "OutputSettings",
    "PipelineConfig",
    "RuntimeSettings",
    "SweepSettings",
    "load_config",
    "read_config_text",
]
