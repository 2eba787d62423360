"""Dataset assembly from cleaned records."""

import logging
from typing import Sequence, Union

import numpy as np
import pandas as pd

from src.errors import DatasetError
from src.models.dataset import Dataset
from src.models.records import AuditRecord, records_to_frame
from src.preprocess.encoding import EncodingPlan, encode
from src.preprocess.features import DERIVED_COLUMNS, derive_features

logger = logging.getLogger(__name__)


def _with_derived(records: Sequence[AuditRecord], plan: EncodingPlan) -> pd.DataFrame:
    """Record frame plus the per-firm history columns ``plan`` asks for."""
    frame = records_to_frame(records)
    trends = [
        name.removesuffix("_trend")
        for name in plan.numeric
        if name.endswith("_trend") and name.removesuffix("_trend") in frame.columns
    ]
    if not trends and not set(DERIVED_COLUMNS) & set(plan.numeric):
        return frame
    logger.debug(f"Deriving history columns per firm (trends: {trends or 'none'})")
    return pd.concat([frame, derive_features(frame, ("firm_name",), trends)], axis=1)


def build_dataset(
    records: Union[Sequence[AuditRecord], pd.DataFrame],
    feature_plan: EncodingPlan,
    labels: Sequence[int] | np.ndarray,
) -> Dataset:
    """Encode imputed records with ``feature_plan`` and wrap them with their labels.

    Plain records get the history columns the plan names (``fraud_rate``,
    ``<field>_trend`` and the rest) derived per firm first; a frame is encoded as given.

    A single-class label vector is accepted and flagged in ``metadata``; training
    operations reject such datasets later.

    Raises:
        DatasetError: empty input, misaligned labels or a residual missing value
    """
    n = len(records)
    if n == 0:
        raise DatasetError("empty dataset: no records")
    labels_arr = np.asarray(labels, dtype=np.int64)
    if labels_arr.shape != (n,):
        raise DatasetError(f"{labels_arr.shape[0]} labels for {n} records")

    rows = records if isinstance(records, pd.DataFrame) else _with_derived(records, feature_plan)
    encoded = encode(rows, feature_plan)
    if isinstance(records, pd.DataFrame):
        group_keys = tuple(str(v) for v in records["firm_name"])
    else:
        group_keys = tuple(r.firm_name for r in records)

    single_class = bool(np.unique(labels_arr).size < 2)
    if single_class:
        logger.warning("Building a single-class dataset; training will reject it")
    return Dataset(
        features=encoded.matrix,
        feature_names=encoded.feature_names,
        labels=labels_arr,
        group_keys=group_keys,
        metadata={"single_class": single_class, "encoding_plan": encoded.plan},
    )
