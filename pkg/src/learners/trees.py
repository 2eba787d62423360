"""CART decision trees with Gini splits and the bootstrap random forest."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from src.errors import ImportanceError, ParameterError, PredictionError, TrainingError
from src.models.dataset import Dataset

logger = logging.getLogger(__name__)

LEAF = -1


class TreeParams(BaseModel):
    """Growth limits for one CART tree."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_depth: Optional[int] = Field(15, ge=1, description="None grows until pure")
    min_samples_split: int = Field(10, ge=2)
    min_samples_leaf: int = Field(5, ge=1)
    features_per_split: Union[Literal["sqrt"], int] = "sqrt"

    def candidates_per_split(self, n_features: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, math.isqrt(n_features))
        if not 1 <= self.features_per_split <= n_features:
            raise ParameterError(
                f"features_per_split={self.features_per_split} must be in [1, {n_features}]"
            )
        return self.features_per_split


class RFParams(BaseModel):
    """Random forest configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_estimators: int = Field(200, ge=1)
    tree: TreeParams = Field(default_factory=TreeParams)
    bootstrap: bool = True
    seed: int = Field(0, ge=0)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


@dataclass(frozen=True)
class DecisionTree:
    """Array-encoded binary tree; node 0 is the root.

    Attributes:
        feature: split feature per node, ``LEAF`` for leaves
        threshold: split threshold per node; rows with ``x <= threshold`` go left
        left, right: child node ids, ``LEAF`` for leaves
        counts: class-0/class-1 training counts per node
        impurity: Gini impurity per node
        depth: depth per node
        n_features: training row width
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    impurity: np.ndarray
    depth: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature == LEAF

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
            "impurity": self.impurity.tolist(),
            "depth": self.depth.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DecisionTree":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            counts=np.asarray(data["counts"], dtype=np.int64).reshape(-1, 2),
            impurity=np.asarray(data["impurity"], dtype=np.float64),
            depth=np.asarray(data["depth"], dtype=np.int64),
            n_features=int(data["n_features"]),
        )


@dataclass(frozen=True)
class Forest:
    """Trees plus the schema and per-tree seeds they were grown with."""

    trees: tuple[DecisionTree, ...]
    feature_names: tuple[str, ...]
    params: RFParams
    tree_seeds: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "trees": [tree.to_dict() for tree in self.trees],
            "feature_names": list(self.feature_names),
            "params": self.params.model_dump(),
            "tree_seeds": list(self.tree_seeds),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Forest":
        return cls(
            trees=tuple(DecisionTree.from_dict(t) for t in data["trees"]),
            feature_names=tuple(data["feature_names"]),
            params=RFParams(**data["params"]),
            tree_seeds=tuple(int(s) for s in data["tree_seeds"]),
        )


def gini(class_counts: Sequence[int] | np.ndarray) -> float:
    """1 - sum((c_i / n)^2).

    Raises:
        TrainingError: all counts are zero
    """
    counts = np.asarray(class_counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise TrainingError("Gini impurity is undefined for an empty node")
    return float(1.0 - np.sum((counts / total) ** 2))


def _side_gini(ones: np.ndarray, size: np.ndarray) -> np.ndarray:
    p = ones / size
    return 1.0 - p**2 - (1.0 - p) ** 2


def best_split(
    features: np.ndarray,
    labels: np.ndarray,
    candidate_features: Sequence[int],
    min_samples_leaf: int = 1,
) -> Optional[Split]:
    """Candidate (feature, midpoint threshold) with the lowest child-weighted Gini.

    Thresholds sit halfway between consecutive distinct sorted values. Splits
    leaving fewer than ``min_samples_leaf`` rows on a side are skipped. Ties go
    to the lower feature index, then the lower threshold.

    Returns:
        The best split, or None when no candidate produces a valid one
    """
    n = len(labels)
    if n < 2:
        return None
    total_ones = float(labels.sum())
    parent = gini([n - total_ones, total_ones])
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    size_ok = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)

    best: Optional[Split] = None
    best_weighted = math.inf
    for j in sorted(candidate_features):
        order = np.argsort(features[:, j], kind="stable")
        xs = features[order, j]
        ones_left = np.cumsum(labels[order], dtype=np.float64)[:-1]
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        weighted = (
            n_left * _side_gini(ones_left, n_left)
            + n_right * _side_gini(total_ones - ones_left, n_right)
        ) / n
        weighted[~valid] = math.inf
        i = int(np.argmin(weighted))
        if weighted[i] < best_weighted:
            threshold = (xs[i] + xs[i + 1]) / 2.0
            if threshold >= xs[i + 1]:
                threshold = xs[i]
            best_weighted = float(weighted[i])
            best = Split(feature=int(j), threshold=float(threshold), gain=parent - best_weighted)
    return best


def _grow(
    features: np.ndarray, labels: np.ndarray, params: TreeParams, rng: np.random.Generator
) -> DecisionTree:
    n, p = features.shape
    if n == 0:
        raise TrainingError("cannot fit a tree on an empty dataset")
    m = params.candidates_per_split(p)
    nodes: list[dict[str, Any]] = []
    # (node id, row indices, depth); children are filled in once created
    stack: list[tuple[int, np.ndarray, int]] = []

    def new_node(rows: np.ndarray, depth: int) -> int:
        ones = int(labels[rows].sum())
        counts = (len(rows) - ones, ones)
        nodes.append(
            {
                "feature": LEAF,
                "threshold": 0.0,
                "left": LEAF,
                "right": LEAF,
                "counts": counts,
                "impurity": gini(counts),
                "depth": depth,
            }
        )
        stack.append((len(nodes) - 1, rows, depth))
        return len(nodes) - 1

    new_node(np.arange(n), 0)
    while stack:
        node_id, rows, depth = stack.pop()
        node = nodes[node_id]
        if (
            node["impurity"] == 0.0
            or len(rows) < params.min_samples_split
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        candidates = np.arange(p) if m == p else np.sort(rng.choice(p, size=m, replace=False))
        split = best_split(features[rows], labels[rows], candidates, params.min_samples_leaf)
        if split is None:
            continue
        goes_left = features[rows, split.feature] <= split.threshold
        node["feature"] = split.feature
        node["threshold"] = split.threshold
        # pushed right then left, so the left subtree is expanded first
        node["right"] = new_node(rows[~goes_left], depth + 1)
        node["left"] = new_node(rows[goes_left], depth + 1)

    return DecisionTree(
        feature=np.array([nd["feature"] for nd in nodes], dtype=np.int64),
        threshold=np.array([nd["threshold"] for nd in nodes], dtype=np.float64),
        left=np.array([nd["left"] for nd in nodes], dtype=np.int64),
        right=np.array([nd["right"] for nd in nodes], dtype=np.int64),
        counts=np.array([nd["counts"] for nd in nodes], dtype=np.int64).reshape(-1, 2),
        impurity=np.array([nd["impurity"] for nd in nodes], dtype=np.float64),
        depth=np.array([nd["depth"] for nd in nodes], dtype=np.int64),
        n_features=p,
    )


def fit_tree(
    dataset: Dataset, params: Optional[TreeParams] = None, rng: Optional[np.random.Generator] = None
) -> DecisionTree:
    """Grow one CART tree; a single-class dataset yields a single leaf."""
    params = params or TreeParams()
    rng = rng if rng is not None else np.random.default_rng(0)
    return _grow(dataset.features, dataset.labels, params, rng)


def _tree_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def _fit_member(
    features: np.ndarray, labels: np.ndarray, params: RFParams, tree_seed: int
) -> DecisionTree:
    rng = np.random.default_rng(tree_seed)
    if params.bootstrap:
        rows = rng.integers(0, len(labels), size=len(labels))
        features, labels = features[rows], labels[rows]
    return _grow(features, labels, params.tree, rng)


def fit_forest(
    dataset: Dataset, params: Optional[RFParams] = None, n_jobs: Optional[int] = None
) -> Forest:
    """Grow ``n_estimators`` trees, each on its own bootstrap sample and seed stream.

    Tree ``i`` is seeded from ``(params.seed, i)``, so the forest is identical for
    any ``n_jobs``.

    Raises:
        TrainingError: the dataset has a single class
    """
    params = params or RFParams()
    if dataset.single_class:
        raise TrainingError("random forest needs both classes in the training data")
    params.tree.candidates_per_split(dataset.n_features)
    seeds = tuple(_tree_seed(params.seed, i) for i in range(params.n_estimators))
    trees = Parallel(n_jobs=n_jobs or 1)(
        delayed(_fit_member)(dataset.features, dataset.labels, params, s) for s in seeds
    )
    logger.info(
        f"Fitted random forest: {params.n_estimators} trees, "
        f"{sum(t.n_nodes for t in trees)} nodes on {dataset.n_rows} rows"
    )
    return Forest(
        trees=tuple(trees),
        feature_names=dataset.feature_names,
        params=params,
        tree_seeds=seeds,
    )


def apply_tree(tree: DecisionTree, rows: np.ndarray) -> np.ndarray:
    """Leaf id reached by each row."""
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != tree.n_features:
        raise PredictionError(
            f"expected rows of width {tree.n_features}, got shape {x.shape}"
        )
    node = np.zeros(len(x), dtype=np.int64)
    active = ~tree.is_leaf[node]
    while active.any():
        idx = np.flatnonzero(active)
        current = node[idx]
        goes_left = x[idx, tree.feature[current]] <= tree.threshold[current]
        node[idx] = np.where(goes_left, tree.left[current], tree.right[current])
        active = ~tree.is_leaf[node]
    return node


def predict_tree(tree: DecisionTree, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leaf-majority labels (ties to 0) and leaf class-1 fractions."""
    counts = tree.counts[apply_tree(tree, rows)]
    labels = (counts[:, 1] > counts[:, 0]).astype(np.int64)
    return labels, counts[:, 1] / counts.sum(axis=1)


def predict_forest(forest: Forest, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Majority vote of tree labels (ties to 0) and the class-1 vote fraction."""
    votes = np.zeros(len(rows), dtype=np.int64)
    for tree in forest.trees:
        votes += predict_tree(tree, rows)[0]
    n_trees = len(forest.trees)
    return (2 * votes > n_trees).astype(np.int64), votes / n_trees


def predict(
    model: Union[Forest, DecisionTree], rows: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Labels and class-1 probabilities for a forest or a single tree."""
    if isinstance(model, Forest):
        return predict_forest(model, rows)
    return predict_tree(model, rows)


def gini_importance(forest: Forest) -> np.ndarray:
    """Mean decrease in impurity per feature, averaged over trees and normalised to 1.

    Raises:
        ImportanceError: no tree has a split with positive impurity decrease
    """
    p = len(forest.feature_names)
    total = np.zeros(p)
    for tree in forest.trees:
        sizes = tree.counts.sum(axis=1).astype(np.float64)
        per_tree = np.zeros(p)
        for node in np.flatnonzero(~tree.is_leaf):
            left, right = tree.left[node], tree.right[node]
            decrease = sizes[node] * tree.impurity[node] - (
                sizes[left] * tree.impurity[left] + sizes[right] * tree.impurity[right]
            )
            per_tree[tree.feature[node]] += decrease / sizes[0]
        total += per_tree
    total /= len(forest.trees)
    if total.sum() <= 0:
        raise ImportanceError("forest has no impurity-reducing split; importance undefined")
    return total / total.sum()
