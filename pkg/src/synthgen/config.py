"""Synthetic audit-data generator settings."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.records import FIRMS, INDUSTRIES, YEAR_RANGE
from src.preprocess.encoding import split_list

# Pairs whose Pearson correlation the generator can plant, with default targets.
SUPPORTED_PAIRS: dict[tuple[str, str], float] = {
    ("high_risk_cases", "risk_percentage"): 0.55,
    ("total_audit_engagements", "fraud_cases_detected"): 0.27,
    ("total_audit_engagements", "risk_percentage"): -0.63,
}


class CorrelationTarget(BaseModel):
    """Target Pearson correlation between two generated variables."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    left: str
    right: str
    value: float = Field(..., ge=-0.95, le=0.95)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.left, self.right)


def _default_targets() -> list[CorrelationTarget]:
    return [
        CorrelationTarget(left=left, right=right, value=value)
        for (left, right), value in SUPPORTED_PAIRS.items()
    ]


class SynthConfig(BaseModel):
    """How many records to generate and which structure to plant in them.

    ``target_correlations`` accepts ``left:right=value`` strings (comma separated
    in the config file); pairs not given keep their default targets.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_records: int = Field(5000, gt=0)
    years: tuple[int, int] = Field(YEAR_RANGE, description="Inclusive year range")
    firms: list[str] = Field(default_factory=lambda: list(FIRMS))
    industries: list[str] = Field(default_factory=lambda: list(INDUSTRIES))
    target_correlations: list[CorrelationTarget] = Field(default_factory=_default_targets)
    noise_level: float = Field(0.1, ge=0.0, description="Latent noise; sets the Bayes error")
    positive_rate_hint: float = Field(0.3, gt=0.0, lt=1.0)
    missing_rate: float = Field(0.0, ge=0.0, lt=0.5)
    label_threshold: float = Field(
        0.15, gt=0.0, lt=1.0, description="Risk cutoff the rate hint refers to"
    )
    n_jobs: Optional[int] = Field(None, description="joblib workers for record blocks")

    _split = field_validator("firms", "industries", mode="before")(split_list)

    @field_validator("years", mode="before")
    @classmethod
    def _parse_years(cls, value):
        if isinstance(value, str):
            low, _, high = value.partition("-")
            return (int(low), int(high or low))
        return value

    @field_validator("target_correlations", mode="before")
    @classmethod
    def _parse_targets(cls, value):
        if isinstance(value, str):
            value = split_list(value)
        parsed = []
        for item in value or []:
            if isinstance(item, str):
                pair, _, number = item.partition("=")
                left, _, right = pair.partition(":")
                item = {"left": left.strip(), "right": right.strip(), "value": float(number)}
            parsed.append(item)
        return parsed

    @model_validator(mode="after")
    def _check(self) -> "SynthConfig":
        low, high = self.years
        if not YEAR_RANGE[0] <= low <= high <= YEAR_RANGE[1]:
            raise ValueError(f"years must lie within {YEAR_RANGE}, got {self.years}")
        for name, given, allowed in (
            ("firms", self.firms, FIRMS),
            ("industries", self.industries, INDUSTRIES),
        ):
            unknown = [v for v in given if v not in allowed]
            if not given or unknown:
                raise ValueError(f"{name} must be a non-empty subset of {allowed}, got {given}")
        seen = set()
        for target in self.target_correlations:
            if target.pair not in SUPPORTED_PAIRS:
                raise ValueError(
                    f"unsupported correlation pair {target.pair}; "
                    f"supported: {sorted(SUPPORTED_PAIRS)}"
                )
            if target.pair in seen:
                raise ValueError(f"duplicate correlation target {target.pair}")
            seen.add(target.pair)
        return self

    def targets(self) -> dict[tuple[str, str], float]:
        """Every supported pair's target, defaults filled in."""
        resolved = dict(SUPPORTED_PAIRS)
        resolved.update({t.pair: t.value for t in self.target_correlations})
        return resolved
