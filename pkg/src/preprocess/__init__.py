"""Preprocessing: imputation, clipping, encoding, history features, scaling and SMOTE."""

from .encoding import OTHER, EncodedRows, EncodingPlan, encode
from .cleaning import ClipRule, ImputePolicy, clip_outliers, impute
from .features import WindowSpec, derive_features, windowize
from .scaling import FittedTransform, apply_scaler, fit_scaler
from .smote import SmoteSettings, smote
from .pipeline import FeaturePipeline, PreparedData, PreprocessSettings

__all__ = [
    "OTHER",
    "EncodedRows",
    "EncodingPlan",
    "encode",
    "ClipRule",
    "ImputePolicy",
    "clip_outliers",
    "impute",
    "WindowSpec",
    "derive_features",
    "windowize",
    "FittedTransform",
    "apply_scaler",
    "fit_scaler",
    "SmoteSettings",
    "smote",
    "FeaturePipeline",
    "PreparedData",
    "PreprocessSettings",
]
