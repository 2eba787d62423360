"""Command-line front end: subcommands, model files and report writers."""

from .persistence import FORMAT_VERSION, ModelFile, TrainedModel, load_model, save_model
from .reports import ReportWriter
from .commands import Context, build_parser

__all__ = [
    "FORMAT_VERSION",
    "ModelFile",
    "TrainedModel",
    "load_model",
    "save_model",
    "ReportWriter",
    "Context",
    "build_parser",
]
