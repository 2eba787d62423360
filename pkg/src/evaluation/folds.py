"""Stratified K-fold assignment."""

import hashlib
from typing import Sequence

import numpy as np

from src.errors import ParameterError, StratificationError


def stratified_folds(labels: Sequence[int] | np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Split row indices into ``k`` disjoint folds with per-class counts within one.

    Each class is shuffled with the seeded stream and dealt round-robin; the deal
    continues from where the previous class stopped so fold sizes stay balanced.

    Returns:
        ``k`` sorted index arrays that partition ``range(len(labels))``

    Raises:
        StratificationError: a class has fewer than ``k`` rows
    """
    if k < 1:
        raise ParameterError(f"fold count must be positive, got {k}")
    labels = np.asarray(labels)
    for cls in (0, 1):
        count = int((labels == cls).sum())
        if count < k:
            raise StratificationError(f"class {cls} has {count} rows, fewer than {k} folds")

    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for cls in (0, 1):
        members = rng.permutation(np.flatnonzero(labels == cls))
        assignment[members] = (offset + np.arange(len(members))) % k
        offset = (offset + len(members)) % k
    return [np.flatnonzero(assignment == fold) for fold in range(k)]


def folds_digest(folds: Sequence[np.ndarray]) -> str:
    """SHA-256 over the fold index sets, in fold order."""
    digest = hashlib.sha256()
    for fold in folds:
        digest.update(np.asarray(fold, dtype=np.int64).tobytes())
        digest.update(b"|")
    return digest.hexdigest()
