"""Pipeline configuration: every section with its defaults."""

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from src.learners.base import ModelSpec
from src.learners.knn import KNNParams
from src.learners.svm import SVMParams
from src.learners.trees import RFParams
from src.models.records import LabelSpec
from src.preprocess.encoding import split_list
from src.preprocess.pipeline import PreprocessSettings
from src.preprocess.smote import SmoteSettings
from src.synthgen.config import SynthConfig


class DataSettings(BaseModel):
    """Where the records come from: the generator or a CSV file."""

    model_config = ConfigDict(extra="forbid")

    source: Literal["synthetic", "csv"] = "synthetic"
    path: Optional[Path] = Field(None, description="CSV file; required for source=csv")

    @model_validator(mode="after")
    def _one_source(self) -> "DataSettings":
        if self.source == "csv":
            if self.path is None:
                raise ValueError("data.path is required when data.source = csv")
            if not self.path.is_file():
                raise ValueError(f"data.path does not exist: {self.path}")
        elif self.path is not None:
            raise ValueError("data.path is only valid with data.source = csv")
        return self


class EvalSettings(BaseModel):
    """Cross-validation settings."""

    model_config = ConfigDict(extra="forbid")

    folds: int = Field(5, ge=2, description="K for stratified K-fold")
    seed: int = Field(42, ge=0)
    models: list[Literal["rf", "svm", "knn", "constant"]] = Field(
        default_factory=lambda: ["rf", "svm", "knn"]
    )
    permutation_repeats: int = Field(5, ge=1)
    numeric_columns: list[Literal["rf", "svm", "knn", "constant"]] = Field(
        default_factory=lambda: ["knn"],
        description="Models trained without the one-hot indicator columns",
    )

    _split = field_validator("models", "numeric_columns", mode="before")(split_list)


class SweepSettings(BaseModel):
    """SVM hyperparameter grid."""

    model_config = ConfigDict(extra="forbid")

    C: list[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0, 100.0])
    gamma: list[float] = Field(default_factory=lambda: [0.01, 0.1, 1.0])

    _split = field_validator("C", "gamma", mode="before")(split_list)


class OutputSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: Path = Path("results")


class RuntimeSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    n_jobs: Optional[int] = Field(None, description="joblib workers; None runs serially")


class PipelineConfig(BaseSettings):
    """Validated pipeline configuration.

    Values come only from the config file (passed as init kwargs); environment
    variables and dotenv files are never consulted. Unknown keys are rejected.
    """

    model_config = SettingsConfigDict(extra="forbid", validate_default=True)

    data: DataSettings = Field(default_factory=DataSettings)
    label: LabelSpec = Field(default_factory=LabelSpec)
    synth: SynthConfig = Field(default_factory=SynthConfig)
    preprocess: PreprocessSettings = Field(default_factory=PreprocessSettings)
    rf: RFParams = Field(default_factory=RFParams)
    svm: SVMParams = Field(default_factory=SVMParams)
    knn: KNNParams = Field(default_factory=KNNParams)
    smote: SmoteSettings = Field(default_factory=SmoteSettings)
    eval: EvalSettings = Field(default_factory=EvalSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    runtime: RuntimeSettings = Field(default_factory=RuntimeSettings)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings,)

    @model_validator(mode="after")
    def _label_matches_generator(self) -> "PipelineConfig":
        if self.synth.label_threshold != self.label.tau:
            self.synth = self.synth.model_copy(update={"label_threshold": self.label.tau})
        return self

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the validated configuration.

        ``output`` and ``runtime`` are left out: they do not change results.
        """
        dump = self.model_dump(mode="json", exclude={"output", "runtime"})
        canonical = json.dumps(dump, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(
        self, seed: Optional[int] = None, out: Optional[Path] = None
    ) -> "PipelineConfig":
        """Copy with ``--seed`` / ``--out`` applied."""
        update = {}
        if seed is not None:
            update["eval"] = self.eval.model_copy(update={"seed": seed})
        if out is not None:
            update["output"] = OutputSettings(dir=out)
        return self.model_copy(update=update)

    def model_spec(self, kind: str) -> ModelSpec:
        """ModelSpec for one learner kind, with its section's parameters."""
        params = {
            "rf": self.rf,
            "svm": self.svm,
            "knn": self.knn,
        }.get(kind)
        return ModelSpec(
            name=kind,
            kind=kind,
            params=params.model_dump() if params is not None else {},
            columns="numeric" if kind in self.eval.numeric_columns else "all",
            smote=kind in self.smote.models,
            smote_k=self.smote.k,
            smote_ratio=self.smote.target_ratio,
        )

    def model_specs(self) -> list[ModelSpec]:
        return [self.model_spec(kind) for kind in self.eval.models]
