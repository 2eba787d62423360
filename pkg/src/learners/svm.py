"""Soft-margin RBF support vector machine trained with Platt's SMO."""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist

from src.errors import PredictionError, TrainingError, WeightingError
from src.models.dataset import Dataset

logger = logging.getLogger(__name__)

KERNEL_CACHE_LIMIT = 4000
ROW_CACHE_SIZE = 512
ALPHA_EPS = 1e-8


class SVMParams(BaseModel):
    """SMO training parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    C: float = Field(10.0, gt=0.0)
    gamma: float = Field(0.1, gt=0.0)
    tolerance: float = Field(1e-3, gt=0.0, description="KKT tolerance")
    max_passes: int = Field(500, ge=1, description="Sweeps over the data before giving up")
    class_weighting: Literal["balanced", "none"] = "balanced"
    seed: int = Field(0, ge=0)
    check_objective: bool = Field(False, description="Assert the dual objective never drops")


@dataclass(frozen=True)
class SVMModel:
    """Support vectors with their dual coefficients; labels are stored as -1/+1."""

    support_indices: np.ndarray
    support_vectors: np.ndarray
    support_labels: np.ndarray
    alphas: np.ndarray
    upper_bounds: np.ndarray
    bias: float
    gamma: float
    scaler_fingerprint: Optional[str]
    converged: bool
    n_passes: int

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    @property
    def coef(self) -> np.ndarray:
        return self.alphas * self.support_labels

    def to_dict(self) -> dict[str, Any]:
        return {
            "support_indices": self.support_indices.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "support_labels": self.support_labels.tolist(),
            "alphas": self.alphas.tolist(),
            "upper_bounds": self.upper_bounds.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "n_features": self.n_features,
            "scaler_fingerprint": self.scaler_fingerprint,
            "converged": self.converged,
            "n_passes": self.n_passes,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SVMModel":
        return cls(
            support_indices=np.asarray(data["support_indices"], dtype=np.int64),
            support_vectors=np.asarray(data["support_vectors"], dtype=np.float64).reshape(
                -1, int(data["n_features"])
            ),
            support_labels=np.asarray(data["support_labels"], dtype=np.float64),
            alphas=np.asarray(data["alphas"], dtype=np.float64),
            upper_bounds=np.asarray(data["upper_bounds"], dtype=np.float64),
            bias=float(data["bias"]),
            gamma=float(data["gamma"]),
            scaler_fingerprint=data.get("scaler_fingerprint"),
            converged=bool(data["converged"]),
            n_passes=int(data["n_passes"]),
        )


def rbf_kernel(x: np.ndarray, z: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - z||^2) for two vectors."""
    x, z = np.asarray(x, dtype=np.float64), np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise PredictionError(f"kernel dimension mismatch: {x.shape} vs {z.shape}")
    return float(np.exp(-gamma * np.sum((x - z) ** 2)))


def rbf_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Kernel values for every row pair of ``a`` and ``b``."""
    return np.exp(-gamma * cdist(a, b, "sqeuclidean"))


def balanced_weights(labels: np.ndarray) -> tuple[float, float]:
    """Per-class weights n / (2 * n_c) for classes 0 and 1.

    Raises:
        WeightingError: one class is absent
    """
    labels = np.asarray(labels)
    n = len(labels)
    n1 = int((labels == 1).sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        raise WeightingError("balanced class weights need both classes")
    return n / (2.0 * n0), n / (2.0 * n1)


class _KernelRows:
    """Full kernel matrix for small problems, an LRU row cache beyond that."""

    def __init__(self, x: np.ndarray, gamma: float):
        self.x = x
        self.gamma = gamma
        self.full = rbf_matrix(x, x, gamma) if len(x) <= KERNEL_CACHE_LIMIT else None
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[i]
        if i in self._rows:
            self._rows.move_to_end(i)
            return self._rows[i]
        row = rbf_matrix(self.x[i : i + 1], self.x, self.gamma)[0]
        self._rows[i] = row
        if len(self._rows) > ROW_CACHE_SIZE:
            self._rows.popitem(last=False)
        return row


class _SMOSolver:
    """Platt SMO with a full error cache E_i = f(x_i) - y_i."""

    def __init__(self, x: np.ndarray, y: np.ndarray, upper: np.ndarray, params: SVMParams):
        self.x = x
        self.y = y
        self.upper = upper
        self.params = params
        # the bias is re-derived from all free vectors at the end, so solve tighter
        self.tol = params.tolerance / 2.0
        self.kernel = _KernelRows(x, params.gamma)
        self.rng = np.random.default_rng(params.seed)
        n = len(y)
        self.alpha = np.zeros(n)
        self.b = 0.0
        self.errors = -y.astype(np.float64)
        self.objective = 0.0

    def _free(self) -> np.ndarray:
        return (self.alpha > ALPHA_EPS) & (self.alpha < self.upper - ALPHA_EPS)

    def _dual_objective(self) -> float:
        g = self.errors + self.y - self.b
        return float(self.alpha.sum() - 0.5 * np.dot(self.alpha * self.y, g))

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        y1, y2 = self.y[i1], self.y[i2]
        a1, a2 = self.alpha[i1], self.alpha[i2]
        c1, c2 = self.upper[i1], self.upper[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if y1 != y2:
            low, high = max(0.0, a2 - a1), min(c2, c1 + a2 - a1)
        else:
            low, high = max(0.0, a1 + a2 - c1), min(c2, a1 + a2)
        if high - low < 1e-12:
            return False

        row1, row2 = self.kernel.row(i1), self.kernel.row(i2)
        k11, k12, k22 = row1[i1], row1[i2], row2[i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = min(max(a2 + y2 * (e1 - e2) / eta, low), high)
        else:
            # objective at both ends of the feasible segment
            f1 = y1 * (e1 + self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (e2 + self.b) - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - low)
            h1 = a1 + s * (a2 - high)
            obj_low = (
                l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 + 0.5 * low * low * k22
                + s * low * l1 * k12
            )
            obj_high = (
                h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 + 0.5 * high * high * k22
                + s * high * h1 * k12
            )
            if obj_low < obj_high - 1e-12:
                a2_new = low
            elif obj_low > obj_high + 1e-12:
                a2_new = high
            else:
                a2_new = a2
        if abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12):
            return False

        a1_new = min(max(a1 + s * (a2 - a2_new), 0.0), c1)
        d1, d2 = y1 * (a1_new - a1), y2 * (a2_new - a2)
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if ALPHA_EPS < a1_new < c1 - ALPHA_EPS:
            b_new = b1
        elif ALPHA_EPS < a2_new < c2 - ALPHA_EPS:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        self.errors += d1 * row1 + d2 * row2 + (b_new - self.b)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.b = b_new

        if self.params.check_objective:
            objective = self._dual_objective()
            if objective < self.objective - 1e-8 * max(1.0, abs(self.objective)):
                raise TrainingError(
                    f"dual objective decreased from {self.objective} to {objective}"
                )
            self.objective = objective
        return True

    def examine(self, i2: int) -> int:
        r2 = self.errors[i2] * self.y[i2]
        a2 = self.alpha[i2]
        if not ((r2 < -self.tol and a2 < self.upper[i2]) or (r2 > self.tol and a2 > 0)):
            return 0
        free = np.flatnonzero(self._free())
        if len(free) > 1:
            i1 = int(free[np.argmax(np.abs(self.errors[i2] - self.errors[free]))])
            if self.take_step(i1, i2):
                return 1
        n = len(self.y)
        start = int(self.rng.integers(n))
        for i1 in np.roll(free, -start % max(len(free), 1)):
            if self.take_step(int(i1), i2):
                return 1
        for i1 in np.roll(np.arange(n), -start):
            if self.take_step(int(i1), i2):
                return 1
        return 0

    def solve(self) -> tuple[bool, int]:
        passes = 0
        changed = 0
        examine_all = True
        while (changed > 0 or examine_all) and passes < self.params.max_passes:
            order = self.rng.permutation(len(self.y))
            if not examine_all:
                order = order[self._free()[order]]
            changed = sum(self.examine(int(i)) for i in order)
            passes += 1
            if examine_all:
                examine_all = False
            elif changed == 0:
                examine_all = True
        converged = not (changed > 0 or examine_all)
        return converged, passes

    def final_bias(self) -> float:
        """Mean of y_i - g_i over free vectors, else the midpoint of the KKT bounds."""
        g = np.zeros(len(self.y))
        support = np.flatnonzero(self.alpha > 0)
        for start in range(0, len(self.y), 2048):
            block = rbf_matrix(self.x[start : start + 2048], self.x[support], self.params.gamma)
            g[start : start + 2048] = (block * (self.alpha * self.y)[support]).sum(axis=1)
        residual = self.y - g
        free = self._free()
        if free.any():
            return float(residual[free].mean())
        at_zero = self.alpha <= ALPHA_EPS
        at_upper = ~at_zero
        positive = self.y > 0
        lower = residual[(at_zero & positive) | (at_upper & ~positive)]
        upper = residual[(at_zero & ~positive) | (at_upper & positive)]
        lo = lower.max() if lower.size else -np.inf
        hi = upper.min() if upper.size else np.inf
        if np.isinf(lo) and np.isinf(hi):
            return 0.0
        if np.isinf(lo):
            return float(hi)
        if np.isinf(hi):
            return float(lo)
        return float((lo + hi) / 2.0)


def smo_fit(
    dataset: Dataset,
    params: Optional[SVMParams] = None,
    scaler_fingerprint: Optional[str] = None,
) -> SVMModel:
    """Train an RBF SVM with SMO on (already scaled) features.

    Labels 0/1 are mapped to -1/+1. With balanced weighting each sample's box
    bound is ``C * n / (2 * n_class)``. A run that exhausts ``max_passes`` returns
    the partial model with ``converged=False``.

    Raises:
        TrainingError: single-class dataset
    """
    params = params or SVMParams()
    if dataset.single_class:
        raise TrainingError("SVM needs both classes in the training data")
    x = dataset.features
    y = np.where(dataset.labels == 1, 1.0, -1.0)
    if params.class_weighting == "balanced":
        w0, w1 = balanced_weights(dataset.labels)
        upper = params.C * np.where(dataset.labels == 1, w1, w0)
    else:
        upper = np.full(len(y), params.C)

    solver = _SMOSolver(x, y, upper, params)
    converged, passes = solver.solve()
    bias = solver.final_bias()
    support = np.flatnonzero(solver.alpha > 0)
    if not converged:
        logger.warning(f"SMO did not converge within {params.max_passes} passes")
    logger.info(
        f"Fitted SVM: {len(support)} support vectors of {len(y)} rows, "
        f"{passes} passes, b={bias:.6f}"
    )
    return SVMModel(
        support_indices=support,
        support_vectors=x[support].copy(),
        support_labels=y[support],
        alphas=solver.alpha[support],
        upper_bounds=upper[support],
        bias=bias,
        gamma=params.gamma,
        scaler_fingerprint=scaler_fingerprint,
        converged=converged,
        n_passes=passes,
    )


def decision_function(model: SVMModel, rows: np.ndarray) -> np.ndarray:
    """f(x) = sum_i alpha_i y_i k(x_i, x) + b."""
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise PredictionError(f"expected rows of width {model.n_features}, got shape {x.shape}")
    if len(model.alphas) == 0:
        return np.full(len(x), model.bias)
    return (rbf_matrix(x, model.support_vectors, model.gamma) * model.coef).sum(axis=1) + model.bias


def decision_and_predict(model: SVMModel, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decision values and 0/1 labels; f(x) = 0 is labelled 1."""
    values = decision_function(model, rows)
    return values, (values >= 0).astype(np.int64)


def dual_objective(model: SVMModel) -> float:
    """W(alpha) = sum(alpha) - 1/2 * sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j)."""
    coef = model.coef
    kernel = rbf_matrix(model.support_vectors, model.support_vectors, model.gamma)
    return float(model.alphas.sum() - 0.5 * coef @ kernel @ coef)


def kkt_violations(
    model: SVMModel, dataset: Dataset, tolerance: Optional[float] = None
) -> np.ndarray:
    """Training rows breaking the KKT conditions by more than ``tolerance``.

    Rows absent from the support set have alpha = 0 and need y*f >= 1 - tol;
    free vectors need |y*f - 1| <= tol; vectors at their bound need y*f <= 1 + tol.
    """
    tol = 1e-3 if tolerance is None else tolerance
    y = np.where(dataset.labels == 1, 1.0, -1.0)
    margin = y * decision_function(model, dataset.features)
    alpha = np.zeros(len(y))
    upper = np.full(len(y), np.inf)
    alpha[model.support_indices] = model.alphas
    upper[model.support_indices] = model.upper_bounds
    at_zero = alpha <= ALPHA_EPS
    at_upper = alpha >= upper - ALPHA_EPS
    free = ~at_zero & ~at_upper
    bad = (
        (at_zero & (margin < 1 - tol))
        | (free & (np.abs(margin - 1) > tol))
        | (at_upper & (margin > 1 + tol))
    )
    return np.flatnonzero(bad)


def check_kkt(model: SVMModel, dataset: Dataset, tolerance: Optional[float] = None) -> bool:
    """True when every training row satisfies the KKT conditions."""
    return kkt_violations(model, dataset, tolerance).size == 0
