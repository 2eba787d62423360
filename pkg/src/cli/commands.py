"""Subcommands of the ``auditml`` command line."""

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd

from src.cli.persistence import TrainedModel, load_model, save_model
from src.cli.reports import (
    ReportWriter,
    comparison_frame,
    correlation_frame,
    cv_frame,
    importance_frame,
    write_figures,
)
from src.config.settings import PipelineConfig
from src.data.labels import derive_labels
from src.data.parsing import parse_records, serialize_records
from src.errors import ConvergenceError, UsageError
from src.evaluation import (
    compare_models,
    cross_validate,
    figure_aggregates,
    forest_importance,
    format_table,
    pearson_matrix,
    permutation_importance,
    stratified_folds,
    sweep_svm,
)
from src.learners.base import fit_model
from src.models.records import AuditRecord
from src.models.reports import ComparisonTable
from src.preprocess.pipeline import FeaturePipeline, PreparedData
from src.synthgen import generate, validate_generation

logger = logging.getLogger(__name__)

MODEL_CHOICES = ("rf", "svm", "knn", "constant")


@dataclass
class Context:
    """Resolved configuration and output location for one command."""

    args: argparse.Namespace
    config: PipelineConfig
    writer: ReportWriter

    @property
    def seed(self) -> int:
        return self.config.eval.seed

    @property
    def n_jobs(self) -> Optional[int]:
        return self.args.n_jobs if self.args.n_jobs is not None else self.config.runtime.n_jobs

    @property
    def inputs(self) -> list[Path]:
        paths = [getattr(self.args, "input", None), getattr(self.args, "model_file", None)]
        if self.args.config is not None:
            paths.append(self.args.config)
        if getattr(self.args, "input", None) is None and self.config.data.source == "csv":
            paths.append(self.config.data.path)
        return [Path(p) for p in paths if p is not None]

    def finish(self, **extra) -> int:
        self.writer.manifest(
            command=self.args.command,
            config_hash=self.config.config_hash(),
            seed=self.seed,
            inputs=self.inputs,
            extra=extra or None,
        )
        return 0


def read_records(path: Path) -> list[AuditRecord]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read input {path}: {exc.strerror or exc}") from exc
    return parse_records(text)


def load_records(ctx: Context) -> list[AuditRecord]:
    """Records from ``--input``, the configured CSV, or the generator."""
    path = getattr(ctx.args, "input", None)
    if path is not None:
        return read_records(path)
    if ctx.config.data.source == "csv":
        return read_records(ctx.config.data.path)
    logger.info(f"Generating {ctx.config.synth.n_records} synthetic records (seed {ctx.seed})")
    return generate(ctx.config.synth, ctx.seed)


def prepare(ctx: Context, records: list[AuditRecord]) -> PreparedData:
    labels = derive_labels(records, ctx.config.label)
    return FeaturePipeline(settings=ctx.config.preprocess).fit_transform(records, labels)


def cmd_gen(ctx: Context) -> int:
    synth = ctx.config.synth
    if ctx.args.n is not None:
        synth = synth.model_copy(update={"n_records": ctx.args.n})
    records = generate(synth, ctx.seed)
    ctx.writer.text("records.csv", serialize_records(records))
    report = validate_generation(records, synth)
    ctx.writer.json("generation_report.json", report)
    if not report.passed and not report.low_n:
        logger.warning("Generated data missed at least one correlation target")
    return ctx.finish(n_records=len(records))


def _key_values(statistics: dict) -> str:
    """Flatten nested statistics into sorted `section.field = value` lines."""
    lines = []
    for section, values in sorted(statistics.items()):
        for name, value in sorted(values.items()):
            if isinstance(value, (tuple, list)):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{section}.{name} = {value}")
    return "\n".join(lines) + "\n"


def cmd_prep(ctx: Context) -> int:
    prepared = prepare(ctx, load_records(ctx))
    dataset = prepared.dataset
    frame = pd.DataFrame(dataset.features, columns=list(dataset.feature_names))
    frame.insert(0, "group", list(dataset.group_keys))
    frame.insert(0, "row", dataset.row_index)
    frame["label"] = dataset.labels
    ctx.writer.csv("prepared.csv", frame)
    ctx.writer.json("pipeline.json", prepared.pipeline)
    ctx.writer.json("prep_report.json", prepared.statistics)
    ctx.writer.text("prep_report.txt", _key_values(prepared.statistics))
    return ctx.finish(n_rows=dataset.n_rows, n_features=dataset.n_features)


def cmd_train(ctx: Context) -> int:
    prepared = prepare(ctx, load_records(ctx))
    spec = ctx.config.model_spec(ctx.args.model)
    fitted = fit_model(spec, prepared.dataset, seed=ctx.seed, n_jobs=ctx.n_jobs)
    if not fitted.converged and not ctx.args.allow_unconverged:
        raise ConvergenceError(
            f"{spec.name} did not converge within max_passes; "
            "raise svm.max_passes or pass --allow-unconverged"
        )
    trained = TrainedModel(
        model=fitted,
        pipeline=prepared.pipeline,
        label=ctx.config.label,
        seed=ctx.seed,
        config_hash=ctx.config.config_hash(),
    )
    target = ctx.args.model_out or ctx.writer.path(f"model_{spec.kind}.json")
    ctx.writer.adopt(save_model(trained, target))
    zeros, ones = prepared.dataset.class_counts()
    ctx.writer.json(
        "train_report.json",
        {
            "model": spec.name,
            "kind": spec.kind,
            "n_rows": prepared.dataset.n_rows,
            "n_features": prepared.dataset.n_features,
            "class_counts": [zeros, ones],
            "smote_rows": fitted.smote_rows,
            "converged": fitted.converged,
        },
    )
    return ctx.finish(model=spec.kind)


def cmd_predict(ctx: Context) -> int:
    trained = load_model(ctx.args.model_file)
    records = read_records(ctx.args.input)
    dataset = trained.pipeline.transform(records)
    labels, scores = trained.model.predict(dataset)
    frame = pd.DataFrame(
        {
            "row": dataset.row_index,
            "group": list(dataset.group_keys),
            "predicted": labels,
            "score": scores,
        }
    )
    ctx.writer.csv("predictions.csv", frame)
    return ctx.finish(model=trained.model.spec.kind, n_rows=dataset.n_rows)


def cmd_cv(ctx: Context) -> int:
    dataset = prepare(ctx, load_records(ctx)).dataset
    spec = ctx.config.model_spec(ctx.args.model)
    report = cross_validate(spec, dataset, ctx.config.eval.folds, ctx.seed, n_jobs=ctx.n_jobs)
    ctx.writer.csv(f"cv_{spec.name}.csv", cv_frame(report))
    ctx.writer.json(f"cv_{spec.name}.json", report)
    ctx.writer.text(f"cv_{spec.name}.txt", format_table(ComparisonTable(rows=[report])))
    return ctx.finish(model=spec.name, folds=ctx.config.eval.folds)


def cmd_compare(ctx: Context) -> int:
    dataset = prepare(ctx, load_records(ctx)).dataset
    table = compare_models(
        ctx.config.model_specs(), dataset, ctx.config.eval.folds, ctx.seed, n_jobs=ctx.n_jobs
    )
    rendered = format_table(table)
    ctx.writer.csv("comparison.csv", comparison_frame(table))
    ctx.writer.json("comparison.json", table)
    ctx.writer.text("comparison.txt", rendered)
    print(rendered, end="")
    return ctx.finish(folds=ctx.config.eval.folds, ranking=table.ranking)


def cmd_importance(ctx: Context) -> int:
    """Gini importance of a forest and permutation importance on a held-out fold."""
    dataset = prepare(ctx, load_records(ctx)).dataset
    folds = stratified_folds(dataset.labels, ctx.config.eval.folds, ctx.seed)
    holdout = folds[0]
    train_idx = np.setdiff1d(np.arange(dataset.n_rows), holdout, assume_unique=True)
    train, test = dataset.subset(train_idx), dataset.subset(holdout)

    forest = fit_model(ctx.config.model_spec("rf"), train, seed=ctx.seed, n_jobs=ctx.n_jobs)
    gini = forest_importance(forest)
    model = (
        forest
        if ctx.args.model == "rf"
        else fit_model(ctx.config.model_spec(ctx.args.model), train, seed=ctx.seed)
    )
    permutation = permutation_importance(
        model, test, ctx.config.eval.permutation_repeats, ctx.seed, n_jobs=ctx.n_jobs
    )
    ctx.writer.csv("importance_gini.csv", importance_frame(gini))
    ctx.writer.csv("importance_permutation.csv", importance_frame(permutation))
    ctx.writer.json(
        "importance.json", {"gini": gini.model_dump(), "permutation": permutation.model_dump()}
    )
    return ctx.finish(model=ctx.args.model, holdout_rows=len(holdout))


def cmd_corr(ctx: Context) -> int:
    matrix = pearson_matrix(load_records(ctx))
    ctx.writer.csv("correlation.csv", correlation_frame(matrix))
    ctx.writer.json("correlation.json", matrix)
    return ctx.finish()


def cmd_figures(ctx: Context) -> int:
    write_figures(ctx.writer, figure_aggregates(load_records(ctx)))
    return ctx.finish()


def cmd_sweep(ctx: Context) -> int:
    dataset = prepare(ctx, load_records(ctx)).dataset
    sweep = ctx.config.sweep
    table = sweep_svm(
        dataset,
        sweep.C,
        sweep.gamma,
        base=ctx.config.model_spec("svm"),
        k=ctx.config.eval.folds,
        seed=ctx.seed,
        n_jobs=ctx.n_jobs,
    )
    ctx.writer.csv("sweep.csv", comparison_frame(table))
    ctx.writer.json("sweep.json", table)
    ctx.writer.text("sweep.txt", format_table(table))
    return ctx.finish(best=table.ranking[0])


def _global_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--config", type=Path, help="key = value configuration file")
    flags.add_argument("--seed", type=int, help="overrides eval.seed")
    flags.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    flags.add_argument("--n-jobs", type=int, help="parallel workers (overrides runtime.n_jobs)")
    flags.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="log verbosity"
    )
    return flags


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    parser = argparse.ArgumentParser(
        prog="auditml", description="Audit-risk identification with RF, SVM and KNN"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(
        name: str, handler: Callable[[Context], int], help_text: str
    ) -> argparse.ArgumentParser:
        command = sub.add_parser(name, parents=[flags], help=help_text, description=help_text)
        command.set_defaults(handler=handler)
        return command

    gen = add("gen", cmd_gen, "Generate a synthetic audit-record CSV")
    gen.add_argument("--n", type=_positive, help="number of records (overrides synth.n_records)")

    for name, handler, help_text in (
        ("prep", cmd_prep, "Preprocess records into a numeric feature CSV"),
        ("corr", cmd_corr, "Pearson correlation matrix of the record columns"),
        ("figures", cmd_figures, "High-risk and revenue-impact aggregates"),
        ("compare", cmd_compare, "Cross-validate every configured model and rank by F1"),
        ("sweep", cmd_sweep, "Grid search over SVM C and gamma"),
    ):
        add(name, handler, help_text).add_argument("--input", type=Path, help="records CSV")

    train = add("train", cmd_train, "Fit one model on all records and save it")
    train.add_argument("--model", choices=MODEL_CHOICES, required=True)
    train.add_argument("--input", type=Path, help="records CSV")
    train.add_argument("--model-out", type=Path, help="model file path")
    train.add_argument("--allow-unconverged", action="store_true")

    predict = add("predict", cmd_predict, "Score a records CSV with a saved model")
    predict.add_argument("model_file", type=Path)
    predict.add_argument("input", type=Path)

    cv = add("cv", cmd_cv, "Stratified K-fold cross-validation of one model")
    cv.add_argument("--model", choices=MODEL_CHOICES, required=True)
    cv.add_argument("--input", type=Path, help="records CSV")

    importance = add("importance", cmd_importance, "Gini and permutation feature importance")
    importance.add_argument("--model", choices=MODEL_CHOICES, default="rf")
    importance.add_argument("--input", type=Path, help="records CSV")
    return parser
