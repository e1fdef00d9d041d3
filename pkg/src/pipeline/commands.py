"""Pipeline commands: each one reads CSV/model files and writes CSV artifacts.

Every command is a pure function of its inputs and seeds, so reruns produce
byte-identical artifacts. Only the manifest, which carries wall-clock
timings, differs between runs.
"""

import functools
import itertools
import logging
import os
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..classifiers.grid_search import GridSearchSpec, grid_search
from ..data.normalization import NormalizationStats, apply_minmax, fit_minmax
from ..data.partition import BranchView, equal_widths, partition_features
from ..data.tabular import TabularDataset, align_labels, load_csv, write_csv
from ..errors import (
    ConfigurationError,
    InvalidDimensionError,
    MiaeError,
    UndefinedMetricError,
)
from ..metrics.detection import ConfusionMatrix, accuracy, confusion, far_mdr, fscore
from ..metrics.quality import QualityReport, quality
from ..models.miae import MiaeConfig, MiaeModel, build
from ..models.miaefs import (
    MiaefsModel,
    build_fs,
    importance_scores,
    masked_reconstruction_error,
    reconstruct_masked_batch,
    select_top_k,
    top_k,
)
from ..models.serialization import (
    ModelDocument,
    document_normalization,
    load_model,
    save_model,
)
from ..models.training import train
from . import reports
from .manifest import ManifestRecorder, file_digest
from .schemas import PipelineConfig

logger = logging.getLogger(__name__)

REPORT_METRICS = ("accuracy", "fscore", "far", "mdr")
SWEEP_COLUMNS = ["k", "beta", *REPORT_METRICS, "d_bet", "d_wit", "data_quality"]
ARCH_SWEEP_COLUMNS = [
    "branches",
    "z_per_branch",
    "d_z",
    "k",
    *REPORT_METRICS,
    "d_bet",
    "d_wit",
    "data_quality",
]


def logged_command(func):
    """Log toolkit errors with the command name before they reach the CLI"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MiaeError as e:
            logger.error(f"{func.__name__} failed: {e}")
            raise

    return wrapper


@dataclass(frozen=True)
class Preprocess:
    """Training-split scaling and branch widths applied before encoding"""

    widths: Tuple[int, ...]
    stats: Optional[NormalizationStats] = None
    feature_names: Optional[List[str]] = None

    @classmethod
    def from_document(cls, document: ModelDocument) -> "Preprocess":
        return cls(
            widths=tuple(document.config.branch_dims),
            stats=document_normalization(document),
            feature_names=document.feature_names,
        )

    def apply(self, ds: TabularDataset) -> BranchView:
        expected = sum(self.widths)
        if ds.n_features != expected:
            raise InvalidDimensionError(
                f"model expects {expected} input columns, dataset has {ds.n_features}"
            )
        if self.feature_names and ds.feature_names != self.feature_names:
            logger.warning("Dataset column names differ from the model's training columns")
        if self.stats is not None:
            ds = apply_minmax(ds, self.stats)
        return partition_features(ds, widths=self.widths)[1]


@dataclass
class EvaluationResult:
    metrics: Dict[str, float]
    confusion: ConfusionMatrix
    best_params: dict
    seconds_per_sample: float


@dataclass
class TrainOutcome:
    model: MiaeModel
    history: List[float]
    preprocess: Preprocess
    train_set: TabularDataset
    model_path: str


# -- shared steps ---------------------------------------------------------


def _seeds(config: PipelineConfig) -> Dict[str, int]:
    return {
        "model": config.model.seed,
        "shuffle": config.training.shuffle_seed,
        "classifier": config.classifier.seed,
    }


def _load_model(path: str, require_fs: bool = False) -> Tuple[MiaeModel, ModelDocument]:
    model, document = load_model(path)
    if require_fs and not isinstance(model, MiaefsModel):
        raise ConfigurationError(f"{path} holds a {model.kind} model; miaefs is required")
    return model, document


def _latent_names(indices: Sequence[int]) -> List[str]:
    return [f"z{int(i)}" for i in indices]


def _select(
    model: MiaeModel, Z: np.ndarray, beta: Optional[float]
) -> Tuple[np.ndarray, np.ndarray]:
    """Columns of Z kept at ``beta`` and their latent indices"""
    if beta is None:
        return Z, np.arange(Z.shape[1])
    if not isinstance(model, MiaefsModel):
        raise ConfigurationError("beta selection needs a miaefs model")
    ranking = importance_scores(model)
    k = top_k(beta, ranking.d_z)
    return select_top_k(Z, ranking, k), ranking.order[:k]


def _normal_index(class_names: List[str], normal_class: Optional[str]) -> int:
    if normal_class is None:
        raise ConfigurationError("a normal class is needed for FAR and MDR")
    if normal_class not in class_names:
        raise ConfigurationError(
            f"normal class '{normal_class}' is not one of {class_names}"
        )
    return class_names.index(normal_class)


def evaluate_representation(
    train_set: TabularDataset,
    test_set: TabularDataset,
    spec: GridSearchSpec,
    normal_class: Optional[str],
) -> EvaluationResult:
    """Grid-search a classifier on the training rows and score the test rows"""
    if train_set.n_features != test_set.n_features:
        raise InvalidDimensionError(
            f"train has {train_set.n_features} columns, test has {test_set.n_features}"
        )
    test_set = align_labels(train_set, test_set)
    normal = _normal_index(test_set.class_names, normal_class)

    search = grid_search(
        spec, train_set.features, train_set.labels, n_classes=len(train_set.class_names)
    )
    start = time.perf_counter()
    predicted = search.model.predict(test_set.features)
    elapsed = time.perf_counter() - start

    # Training classes with no test rows stay in the matrix and add F1 0 to the macro mean
    cm = confusion(
        test_set.labels, predicted, len(test_set.class_names), test_set.class_names
    )
    far, mdr = far_mdr(cm, normal)
    metrics = {"accuracy": accuracy(cm), "fscore": fscore(cm), "far": far, "mdr": mdr}
    logger.info(
        f"Test accuracy {metrics['accuracy']:.4f}, fscore {metrics['fscore']:.4f}, "
        f"FAR {far:.4f}, MDR {mdr:.4f}"
    )
    return EvaluationResult(
        metrics=metrics,
        confusion=cm,
        best_params=search.best_params,
        seconds_per_sample=elapsed / max(test_set.n_samples, 1),
    )


def quality_values(Z: np.ndarray, labels: np.ndarray) -> Dict[str, float]:
    """d_bet, d_wit and their ratio; the ratio is NaN when d_wit is zero"""
    _, compact = np.unique(labels, return_inverse=True)
    try:
        report = quality(Z, compact)
    except UndefinedMetricError as e:
        logger.warning(f"{e}")
        report = e.report
    ratio = report.data_quality
    return {
        "d_bet": report.d_bet,
        "d_wit": report.d_wit,
        "data_quality": ratio if ratio is not None else float("nan"),
    }


def _write_evaluation(result: EvaluationResult, out_dir: str, recorder: ManifestRecorder):
    rows = [(name, result.metrics[name]) for name in REPORT_METRICS]
    recorder.add(reports.write_metric_rows(rows, os.path.join(out_dir, "report.csv")))
    recorder.add(
        reports.write_confusion(result.confusion, os.path.join(out_dir, "confusion.csv"))
    )
    recorder.record_time("inference_per_sample", result.seconds_per_sample)


def _quality_rows(report: QualityReport) -> List[Tuple[str, float]]:
    rows = [("d_bet", report.d_bet), ("d_wit", report.d_wit)]
    if report.data_quality is not None:
        rows.append(("data_quality", report.data_quality))
    return rows


def _write_quality(
    Z: np.ndarray, labels: np.ndarray, path: str, recorder: ManifestRecorder
) -> QualityReport:
    """Write the quality CSV; with d_wit zero only d_bet and d_wit are written"""
    _, compact = np.unique(labels, return_inverse=True)
    try:
        report = quality(Z, compact)
    except UndefinedMetricError as e:
        recorder.add(reports.write_metric_rows(_quality_rows(e.report), path))
        raise
    recorder.add(reports.write_metric_rows(_quality_rows(report), path))
    return report


def sweep_rows(
    model: MiaefsModel,
    train_set: TabularDataset,
    test_set: TabularDataset,
    Z_train: np.ndarray,
    Z_test: np.ndarray,
    spec: GridSearchSpec,
    normal_class: Optional[str],
    ks: Optional[Sequence[int]] = None,
    betas: Optional[Sequence[float]] = None,
) -> List[Dict[str, float]]:
    """select -> evaluate -> quality for each feature count k or beta"""
    if ks is not None and betas is not None:
        raise ConfigurationError("give ks or betas, not both")
    ranking = importance_scores(model)
    if betas is not None:
        plan = [(top_k(beta, ranking.d_z), float(beta)) for beta in betas]
    else:
        counts = ks if ks is not None else range(1, ranking.d_z + 1)
        plan = [(int(k), int(k) / ranking.d_z) for k in counts]

    rows = []
    for k, beta in plan:
        columns = _latent_names(ranking.order[:k])
        train_k = train_set.with_features(select_top_k(Z_train, ranking, k), columns)
        test_k = test_set.with_features(select_top_k(Z_test, ranking, k), columns)
        result = evaluate_representation(train_k, test_k, spec, normal_class)
        row = {"k": k, "beta": beta, **result.metrics}
        row.update(quality_values(test_k.features, test_k.labels))
        logger.info(
            f"Sweep k={k}: accuracy {row['accuracy']:.4f}, "
            f"quality {row['data_quality']:.4f}"
        )
        rows.append(row)
    return rows


def _build_model(
    config: PipelineConfig,
    widths: Sequence[int],
    z_per_branch: Optional[int] = None,
    hidden: Optional[List[List[int]]] = None,
) -> MiaeModel:
    section = config.model
    try:
        architecture = MiaeConfig(
            branch_dims=list(widths),
            branch_hidden=hidden if hidden is not None else section.per_branch_hidden(len(widths)),
            z_per_branch=z_per_branch or section.z_per_branch,
            decoder_hidden=section.decoder_hidden if hidden is None else None,
            seed=section.seed,
        )
    except ValidationError as e:
        raise ConfigurationError(f"invalid model architecture: {e}") from None
    if section.kind == "miaefs":
        return build_fs(architecture, alpha=section.alpha, bottleneck=section.bottleneck)
    return build(architecture)


def _load_split(path: str, label_column: str) -> TabularDataset:
    return load_csv(path, label_column)


def _require_test(config: PipelineConfig) -> str:
    if config.dataset.test is None:
        raise ConfigurationError("dataset.test is required for this command")
    return config.dataset.test


def _parameter_count(model: MiaeModel) -> int:
    return int(sum(p.size for p in model.parameters().values()))


def _train(config: PipelineConfig, recorder: ManifestRecorder) -> TrainOutcome:
    out = config.output_dir
    train_set = _load_split(config.dataset.train, config.dataset.label_column)
    partition, _ = partition_features(
        train_set, widths=config.partition.widths, n_branches=config.partition.branches
    )
    model = _build_model(config, partition.widths)

    stats = fit_minmax(train_set) if config.dataset.normalize else None
    preprocess = Preprocess(partition.widths, stats, train_set.feature_names)
    view = preprocess.apply(train_set)

    with recorder.stage("train"):
        model, history = train(model, view, config.training)

    model_path = recorder.add(
        save_model(model, os.path.join(out, "model.json"), stats, train_set.feature_names)
    )
    recorder.add(reports.write_loss_history(history, os.path.join(out, "loss_history.csv")))
    recorder.record_size("model_file_bytes", os.path.getsize(model_path))
    recorder.record_size("parameters", _parameter_count(model))
    return TrainOutcome(model, history, preprocess, train_set, model_path)


# -- commands -------------------------------------------------------------


@logged_command
def cmd_train(config: PipelineConfig) -> TrainOutcome:
    """Train the configured model; writes model.json, loss_history.csv and a manifest"""
    recorder = ManifestRecorder(
        "train", config.output_dir, config.model_dump(mode="json"), _seeds(config)
    )
    outcome = _train(config, recorder)
    recorder.write("train_manifest.json")
    return outcome


@logged_command
def cmd_encode(
    model_path: str,
    data_path: str,
    out_dir: str,
    label_column: str = "label",
    beta: Optional[float] = None,
) -> str:
    """Latent representation of a dataset, optionally reduced to the top beta share"""
    model, document = _load_model(model_path)
    ds = _load_split(data_path, label_column)
    Z = model.encode_batch(Preprocess.from_document(document).apply(ds))
    Z, indices = _select(model, Z, beta)

    stem = os.path.splitext(os.path.basename(data_path))[0]
    recorder = ManifestRecorder(
        "encode",
        out_dir,
        {"model": file_digest(model_path), "data": file_digest(data_path), "beta": beta},
        {"model": document.config.seed},
    )
    encoded = ds.with_features(Z, _latent_names(indices))
    path = recorder.add(write_csv(encoded, os.path.join(out_dir, f"{stem}_encoded.csv")))
    recorder.write("encode_manifest.json")
    return path


@logged_command
def cmd_evaluate(
    train_path: str,
    test_path: str,
    out_dir: str,
    spec: GridSearchSpec,
    normal_class: Optional[str],
    label_column: str = "label",
) -> EvaluationResult:
    """Grid search on the training CSV, metrics and confusion matrix on the test CSV"""
    train_set = _load_split(train_path, label_column)
    test_set = _load_split(test_path, label_column)
    recorder = ManifestRecorder(
        "evaluate",
        out_dir,
        {
            "train": file_digest(train_path),
            "test": file_digest(test_path),
            "classifier": spec.model_dump(mode="json"),
            "normal_class": normal_class,
        },
        {"classifier": spec.seed},
    )
    with recorder.stage("evaluate"):
        result = evaluate_representation(train_set, test_set, spec, normal_class)
    _write_evaluation(result, out_dir, recorder)
    recorder.write("evaluate_manifest.json")
    return result


@logged_command
def cmd_quality(data_path: str, out_dir: str, label_column: str = "label") -> QualityReport:
    """d_bet, d_wit and data quality of a representation CSV"""
    ds = _load_split(data_path, label_column)
    recorder = ManifestRecorder("quality", out_dir, {"data": file_digest(data_path)}, {})
    try:
        path = os.path.join(out_dir, "quality.csv")
        return _write_quality(ds.features, ds.labels, path, recorder)
    finally:
        recorder.write("quality_manifest.json")


@logged_command
def cmd_sweep(
    model_path: str,
    train_path: str,
    test_path: str,
    out_dir: str,
    spec: GridSearchSpec,
    normal_class: Optional[str],
    label_column: str = "label",
    ks: Optional[Sequence[int]] = None,
    betas: Optional[Sequence[float]] = None,
) -> str:
    """One row of detection and quality metrics per retained feature count"""
    model, document = _load_model(model_path, require_fs=True)
    preprocess = Preprocess.from_document(document)
    train_set = _load_split(train_path, label_column)
    test_set = _load_split(test_path, label_column)
    Z_train = model.encode_batch(preprocess.apply(train_set))
    Z_test = model.encode_batch(preprocess.apply(test_set))

    recorder = ManifestRecorder(
        "sweep",
        out_dir,
        {
            "model": file_digest(model_path),
            "train": file_digest(train_path),
            "test": file_digest(test_path),
            "classifier": spec.model_dump(mode="json"),
            "ks": list(ks) if ks is not None else None,
            "betas": list(betas) if betas is not None else None,
        },
        {"model": document.config.seed, "classifier": spec.seed},
    )
    with recorder.stage("sweep"):
        rows = sweep_rows(
            model, train_set, test_set, Z_train, Z_test, spec, normal_class, ks, betas
        )
    path = recorder.add(
        reports.write_table(rows, os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS)
    )
    recorder.write("sweep_manifest.json")
    return path


@logged_command
def cmd_reconstruct(
    model_path: str, data_path: str, out_dir: str, beta: float, label_column: str = "label"
) -> str:
    """Decode each row from its top-beta latent features, the rest set to zero"""
    model, document = _load_model(model_path, require_fs=True)
    ds = _load_split(data_path, label_column)
    view = Preprocess.from_document(document).apply(ds)
    ranking = importance_scores(model)
    xhat = reconstruct_masked_batch(model, model.encode_batch(view), ranking, beta)
    logger.info(
        f"Masked reconstruction MSE at beta={beta}: "
        f"{masked_reconstruction_error(model, view, ranking, beta):.6f}"
    )
    recorder = ManifestRecorder(
        "reconstruct",
        out_dir,
        {"model": file_digest(model_path), "data": file_digest(data_path), "beta": beta},
        {"model": document.config.seed},
    )
    reconstructed = ds.with_features(xhat, ds.feature_names)
    path = recorder.add(write_csv(reconstructed, os.path.join(out_dir, "reconstruction.csv")))
    recorder.write("reconstruct_manifest.json")
    return path


@logged_command
def cmd_rank(model_path: str, out_dir: str) -> str:
    """Importance score and rank of every latent feature"""
    model, document = _load_model(model_path, require_fs=True)
    recorder = ManifestRecorder(
        "rank", out_dir, {"model": file_digest(model_path)}, {"model": document.config.seed}
    )
    ranking = importance_scores(model)
    path = recorder.add(reports.write_ranking(ranking, os.path.join(out_dir, "ranking.csv")))
    recorder.write("rank_manifest.json")
    return path


@logged_command
def cmd_arch_sweep(config: PipelineConfig) -> str:
    """Train one miaefs model per (branch count, latent width) pair and score it"""
    if config.model.kind != "miaefs":
        raise ConfigurationError("the architecture sweep trains miaefs models")
    if any(isinstance(h, list) for h in config.model.branch_hidden):
        raise ConfigurationError(
            "the architecture sweep needs one hidden list shared by all branches"
        )
    out = config.output_dir
    train_set = _load_split(config.dataset.train, config.dataset.label_column)
    test_set = _load_split(_require_test(config), config.dataset.label_column)
    _normal_index(align_labels(train_set, test_set).class_names, config.dataset.normal_class)
    stats = fit_minmax(train_set) if config.dataset.normalize else None

    recorder = ManifestRecorder(
        "arch-sweep", out, config.model_dump(mode="json"), _seeds(config)
    )
    rows = []
    pairs = itertools.product(config.model.sweep_branches, config.model.sweep_z_per_branch)
    for n_branches, z_per_branch in pairs:
        if n_branches > train_set.n_features:
            logger.warning(
                f"Skipping {n_branches} branches: only {train_set.n_features} columns"
            )
            continue
        widths = equal_widths(train_set.n_features, n_branches)
        hidden = [list(config.model.branch_hidden) for _ in widths]
        model = _build_model(config, widths, z_per_branch, hidden)
        preprocess = Preprocess(widths, stats, train_set.feature_names)
        with recorder.stage(f"train_b{n_branches}_z{z_per_branch}"):
            model, _ = train(model, preprocess.apply(train_set), config.training)

        Z_train = model.encode_batch(preprocess.apply(train_set))
        Z_test = model.encode_batch(preprocess.apply(test_set))
        (row,) = sweep_rows(
            model,
            train_set,
            test_set,
            Z_train,
            Z_test,
            config.classifier,
            config.dataset.normal_class,
            betas=[config.model.beta],
        )
        rows.append(
            {"branches": n_branches, "z_per_branch": z_per_branch, "d_z": model.config.d_z, **row}
        )
        recorder.record_size(
            f"parameters_b{n_branches}_z{z_per_branch}", _parameter_count(model)
        )

    path = recorder.add(
        reports.write_table(rows, os.path.join(out, "arch_sweep.csv"), ARCH_SWEEP_COLUMNS)
    )
    recorder.write("arch_sweep_manifest.json")
    return path


@logged_command
def cmd_run(config: PipelineConfig) -> Dict[str, str]:
    """train -> encode -> evaluate -> quality (-> rank and sweep for miaefs)"""
    out = config.output_dir
    recorder = ManifestRecorder("run", out, config.model_dump(mode="json"), _seeds(config))
    test_path = _require_test(config)
    normal_class = config.dataset.normal_class

    outcome = _train(config, recorder)
    model = outcome.model
    train_set = outcome.train_set
    test_set = align_labels(train_set, _load_split(test_path, config.dataset.label_column))
    _normal_index(test_set.class_names, normal_class)

    with recorder.stage("encode"):
        Z_train = model.encode_batch(outcome.preprocess.apply(train_set))
        Z_test = model.encode_batch(outcome.preprocess.apply(test_set))
    beta = config.model.beta if isinstance(model, MiaefsModel) else None
    train_sel, indices = _select(model, Z_train, beta)
    test_sel, _ = _select(model, Z_test, beta)
    names = _latent_names(indices)
    train_repr = train_set.with_features(train_sel, names)
    test_repr = test_set.with_features(test_sel, names)
    recorder.add(write_csv(train_repr, os.path.join(out, "train_encoded.csv")))
    recorder.add(write_csv(test_repr, os.path.join(out, "test_encoded.csv")))

    with recorder.stage("evaluate"):
        result = evaluate_representation(train_repr, test_repr, config.classifier, normal_class)
    _write_evaluation(result, out, recorder)

    raw_test = outcome.preprocess.apply(test_set).concat()
    for Z, name in ((raw_test, "quality_input.csv"), (test_repr.features, "quality.csv")):
        try:
            _write_quality(Z, test_set.labels, os.path.join(out, name), recorder)
        except UndefinedMetricError:
            logger.warning(f"{name}: data quality undefined, wrote d_bet and d_wit only")

    if isinstance(model, MiaefsModel):
        ranking = importance_scores(model)
        recorder.add(reports.write_ranking(ranking, os.path.join(out, "ranking.csv")))
        with recorder.stage("sweep"):
            rows = sweep_rows(
                model,
                train_set,
                test_set,
                Z_train,
                Z_test,
                config.classifier,
                normal_class,
                betas=config.model.betas,
            )
        recorder.add(reports.write_table(rows, os.path.join(out, "sweep.csv"), SWEEP_COLUMNS))

    manifest = recorder.write("run_manifest.json")
    logger.info(f"Run complete: {len(recorder.manifest.artifacts)} artifacts in {out}")
    return {"manifest": manifest, "model": outcome.model_path}
