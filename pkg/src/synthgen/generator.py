"""Seeded synthetic audit records with planted correlations and a latent risk signal.

Numeric structure comes from a Gaussian copula. Independent standard normals
drive engagements (``z_t``), violations (``z_v``) and workload (``z_w``); a risk
score ``s = a*z_t + b*(z_v + z_w)`` mixes them and the latent risk
``z_p = lam*s + sqrt(1 - lam**2)*e`` adds noise, with ``lam = 1/sqrt(1 + noise**2)``.
Marginal transforms then turn the normals into counts (lognormal / Poisson
quantiles) and bounded reals. The high-risk count is ``round(p * total)`` so the
risk percentage is realised exactly, and the copula parameters are calibrated on
a fixed pilot sample until the three Pearson targets are met.
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from src.data.labels import derive_labels
from src.errors import GenerationError
from src.evaluation.metrics import confusion_matrix, metrics
from src.models.records import AuditRecord, LabelSpec
from src.synthgen.config import SynthConfig

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1024
PILOT_SIZE = 20_000
PILOT_SEED = 20_240_917
CALIBRATION_ROUNDS = 12
CALIBRATION_TOLERANCE = 0.02

RISK_SPREAD = 0.45
ENGAGEMENT_MEDIAN = 150.0
VIOLATION_MEAN = 12.0
FRAUD_MEAN = 6.0
REGIONS = ("APAC", "EMEA", "LATAM", "NA")
FINANCIAL_STATUSES = ("Distressed", "Stable", "Strong")

# Fields that may go missing; the label inputs and identity fields never do.
MISSABLE_FIELDS = (
    "compliance_violations",
    "fraud_cases_detected",
    "industry_affected",
    "total_revenue_impact",
    "ai_used_for_auditing",
    "employee_workload",
    "market_value",
    "region",
    "financial_status",
)

TP_PAIR = ("total_audit_engagements", "risk_percentage")
HP_PAIR = ("high_risk_cases", "risk_percentage")
TF_PAIR = ("total_audit_engagements", "fraud_cases_detected")


@dataclass(frozen=True)
class CopulaParams:
    """Calibrated latent parameters.

    Attributes:
        rho: correlation of z_t with the latent risk z_p
        spread_ratio: log-spread of engagements relative to RISK_SPREAD
        rho_tf: correlation of z_t with the fraud normal
        lam: signal share of the latent risk, 1/sqrt(1 + noise**2)
        mu_p: log-scale location of the risk percentage
        risk_cutoff: z_p value at which the risk percentage reaches the label cutoff
    """

    rho: float
    spread_ratio: float
    rho_tf: float
    lam: float
    mu_p: float
    risk_cutoff: float

    @property
    def score_weights(self) -> tuple[float, float]:
        a = self.rho / self.lam
        return a, math.sqrt((1.0 - a * a) / 2.0)


def _draw_numeric(
    params: CopulaParams, n: int, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    z_t, z_v, z_w, e_f, e_p = rng.standard_normal((5, n))
    a, b = params.score_weights
    score = a * z_t + b * (z_v + z_w)
    z_p = params.lam * score + math.sqrt(1.0 - params.lam**2) * e_p
    z_f = params.rho_tf * z_t + math.sqrt(1.0 - params.rho_tf**2) * e_f

    sigma_t = params.spread_ratio * RISK_SPREAD
    total = np.maximum(1, np.rint(np.exp(np.log(ENGAGEMENT_MEDIAN) + sigma_t * z_t)))
    risk = np.minimum(1.0, np.exp(params.mu_p + RISK_SPREAD * z_p))
    high = np.minimum(total, np.rint(risk * total))
    eps = 1e-12
    violations = stats.poisson.ppf(np.clip(stats.norm.cdf(z_v), eps, 1 - eps), VIOLATION_MEAN)
    fraud = stats.poisson.ppf(np.clip(stats.norm.cdf(z_f), eps, 1 - eps), FRAUD_MEAN)
    workload = np.round(np.clip(45.0 + 7.0 * z_w, 20.0, 80.0), 1)
    return {
        "total_audit_engagements": total.astype(np.int64),
        "high_risk_cases": high.astype(np.int64),
        "compliance_violations": violations.astype(np.int64),
        "fraud_cases_detected": fraud.astype(np.int64),
        "employee_workload": workload,
        "score": score,
    }


def _pilot_correlations(params: CopulaParams) -> dict[tuple[str, str], float]:
    rng = np.random.default_rng(PILOT_SEED)
    draw = _draw_numeric(params, PILOT_SIZE, rng)
    total = draw["total_audit_engagements"].astype(np.float64)
    risk = draw["high_risk_cases"] / total
    return {
        TP_PAIR: float(np.corrcoef(total, risk)[0, 1]),
        HP_PAIR: float(np.corrcoef(draw["high_risk_cases"], risk)[0, 1]),
        TF_PAIR: float(np.corrcoef(total, draw["fraud_cases_detected"])[0, 1]),
    }


def _initial_spread_ratio(t_tp: float, t_hp: float) -> float:
    """Log-space solution of corr(H, p) = t_hp given corr(T, p) = t_tp, with H = p*T."""
    # (1 + r*k)^2 = t^2 * (1 + k^2 + 2*r*k), solved for k > 0 with 1 + r*k of sign t
    r, t = t_tp, t_hp
    roots = np.roots([r * r - t * t, 2 * r * (1 - t * t), 1 - t * t])
    valid = [
        float(k.real)
        for k in roots
        if abs(k.imag) < 1e-12 and k.real > 0 and np.sign(1 + r * k.real) == np.sign(t)
    ]
    if not valid:
        raise GenerationError(
            f"infeasible correlation target {HP_PAIR} = {t_hp} given {TP_PAIR} = {t_tp}: "
            f"high-risk correlation must exceed the engagement correlation"
        )
    return min(valid)


def _check_feasible(rho: float, lam: float, spread_ratio: float, rho_tf: float, noise: float):
    if abs(rho / lam) > 1.0:
        raise GenerationError(
            f"infeasible correlation target {TP_PAIR}: |{rho:.3f}| exceeds the signal share "
            f"{lam:.3f} allowed by noise_level {noise}"
        )
    if abs(rho_tf) >= 1.0:
        raise GenerationError(f"infeasible correlation target {TF_PAIR}")
    if not 0.05 <= spread_ratio <= 20.0:
        raise GenerationError(f"infeasible correlation target {HP_PAIR}")
    latent = np.array(
        [[1.0, rho, rho_tf], [rho, 1.0, rho * rho_tf], [rho_tf, rho * rho_tf, 1.0]]
    )
    if np.linalg.eigvalsh(latent).min() < -1e-10:
        raise GenerationError(f"latent correlation of {TP_PAIR} and {TF_PAIR} is not PSD")


@functools.lru_cache(maxsize=32)
def _calibrate(
    targets: tuple[float, float, float],
    noise_level: float,
    positive_rate: float,
    label_threshold: float,
) -> CopulaParams:
    t_tp, t_hp, t_tf = targets
    lam = 1.0 / math.sqrt(1.0 + noise_level**2)
    # P(p >= threshold) = positive_rate when z_p is standard normal
    risk_cutoff = float(stats.norm.ppf(1.0 - positive_rate))
    mu_p = math.log(label_threshold) - RISK_SPREAD * risk_cutoff

    rho, rho_tf = t_tp, t_tf
    log_k = math.log(_initial_spread_ratio(t_tp, t_hp))
    for _ in range(CALIBRATION_ROUNDS):
        _check_feasible(rho, lam, math.exp(log_k), rho_tf, noise_level)
        params = CopulaParams(rho, math.exp(log_k), rho_tf, lam, mu_p, risk_cutoff)
        achieved = _pilot_correlations(params)
        rho += t_tp - achieved[TP_PAIR]
        log_k += achieved[HP_PAIR] - t_hp
        rho_tf += t_tf - achieved[TF_PAIR]

    _check_feasible(rho, lam, math.exp(log_k), rho_tf, noise_level)
    params = CopulaParams(rho, math.exp(log_k), rho_tf, lam, mu_p, risk_cutoff)
    achieved = _pilot_correlations(params)
    wanted = {TP_PAIR: t_tp, HP_PAIR: t_hp, TF_PAIR: t_tf}
    pair, gap = max(((p, abs(achieved[p] - wanted[p])) for p in wanted), key=lambda x: x[1])
    if gap > CALIBRATION_TOLERANCE:
        raise GenerationError(
            f"infeasible correlation target {pair} = {wanted[pair]}: "
            f"closest reachable value is {achieved[pair]:.3f}"
        )
    logger.debug(f"Calibrated copula parameters: {params}")
    return params


def calibrate(config: SynthConfig) -> CopulaParams:
    """Copula parameters realising ``config``'s correlation targets.

    Raises:
        GenerationError: the targets cannot be met jointly; names the offending pair
    """
    targets = config.targets()
    return _calibrate(
        (targets[TP_PAIR], targets[HP_PAIR], targets[TF_PAIR]),
        config.noise_level,
        config.positive_rate_hint,
        config.label_threshold,
    )


def _draw_block(
    config: SynthConfig, params: CopulaParams, n: int, seed: int, block: int
) -> tuple[list[AuditRecord], np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    numeric = _draw_numeric(params, n, rng)
    low, high = config.years
    columns: dict[str, Any] = {
        "year": rng.integers(low, high + 1, size=n),
        "firm_name": rng.choice(config.firms, size=n),
        "industry_affected": rng.choice(config.industries, size=n),
        "total_revenue_impact": np.round(np.exp(rng.normal(math.log(250.0), 0.8, size=n)), 2),
        "ai_used_for_auditing": rng.random(n) < 0.5,
        "market_value": np.round(np.exp(rng.normal(math.log(5000.0), 0.6, size=n)), 2),
        "region": rng.choice(REGIONS, size=n),
        "financial_status": rng.choice(FINANCIAL_STATUSES, size=n),
        **{k: v for k, v in numeric.items() if k != "score"},
    }
    missing = rng.random((n, len(MISSABLE_FIELDS))) < config.missing_rate

    records = []
    for i in range(n):
        row = {name: values[i].item() for name, values in columns.items()}
        for j, name in enumerate(MISSABLE_FIELDS):
            if missing[i, j]:
                row[name] = None
        records.append(AuditRecord(**row))
    return records, numeric["score"]


def generate_with_latent(
    config: SynthConfig, seed: int
) -> tuple[list[AuditRecord], np.ndarray]:
    """Generate records together with each record's latent risk score ``s``."""
    if seed < 0:
        raise GenerationError(f"seed must be non-negative, got {seed}")
    params = calibrate(config)
    sizes = [
        min(BLOCK_SIZE, config.n_records - start)
        for start in range(0, config.n_records, BLOCK_SIZE)
    ]
    blocks = Parallel(n_jobs=config.n_jobs or 1)(
        delayed(_draw_block)(config, params, size, seed, b) for b, size in enumerate(sizes)
    )
    records = [record for block_records, _ in blocks for record in block_records]
    scores = np.concatenate([score for _, score in blocks])
    logger.info(f"Generated {len(records)} records in {len(sizes)} blocks (seed {seed})")
    return records, scores


def generate(config: SynthConfig, seed: int) -> list[AuditRecord]:
    """Generate ``config.n_records`` audit records; identical (config, seed) give identical output.

    Raises:
        GenerationError: infeasible correlation targets or a negative seed
    """
    records, _ = generate_with_latent(config, seed)
    return records


def oracle_threshold(config: SynthConfig) -> float:
    """Latent score above which a record is more likely high risk than not."""
    params = calibrate(config)
    return params.risk_cutoff / params.lam


def oracle_predictions(config: SynthConfig, scores: np.ndarray) -> np.ndarray:
    """Bayes-style labels from latent scores; an upper reference for classifiers."""
    return (np.asarray(scores) >= oracle_threshold(config)).astype(np.int64)


def oracle_f1(config: SynthConfig, seed: int, tau: Optional[float] = None) -> float:
    """F1 of the latent-score oracle against the derived labels of generated records."""
    records, scores = generate_with_latent(config, seed)
    labels = derive_labels(records, LabelSpec(tau=tau or config.label_threshold))
    return metrics(confusion_matrix(labels, oracle_predictions(config, scores))).f1
