"""End-to-end orchestration: load, adapt, classify, evaluate, report.

A pipeline run executes the five stages (per-class source subspaces, anchor
mining, anchor labeling, joint-subspace assembly, one-vs-rest SVM) once per
repetition with a per-repetition seed derived as ``seed + run_index``, then
aggregates accuracies into an evaluation report. Reports serialize to JSON
deterministically (sorted keys), so identical configs and seeds produce
byte-identical files apart from the wall-clock field.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import classifier as clf
from .clustering import ClusteringParams, build_anchor_subspaces
from .data import DomainDataset, load_dataset, merge_domains
from .errors import LengthMismatch
from .labeling import (LabelingProblem, LabelingResult, discretize,
                       label_anchors_soft, resolve_rho)
from .subspaces import (build_affinities, build_class_subspaces,
                        pairwise_distances)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one adaptation experiment needs.

    ``source_features``/``source_labels`` are parallel path lists (labels
    required); targets mirror them with labels optional (used only for
    scoring). ``sigma`` of None selects the per-matrix median bandwidth;
    ``rho`` of None selects the balanced topology weight C/K.
    """

    source_features: list[str] = field(default_factory=list)
    source_labels: list[str] = field(default_factory=list)
    target_features: list[str] = field(default_factory=list)
    target_labels: list[str] = field(default_factory=list)
    gamma: int = 20
    anchor_size: int = 5
    sigma: float | None = None
    rho: float | None = None
    mu: float = 1.0
    tol: float = 1e-6
    max_iter: int = 10000
    reg_c: float = 1.0
    rank_tol: float = 1e-10
    runs: int = 20
    seed: int = 0
    one_based_labels: bool = False
    l2_normalize: bool = False
    output: str | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.reg_c <= 0.0:
            raise ValueError("reg_c must be positive")
        if self.sigma is not None and self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if self.rho is not None and self.rho < 0.0:
            raise ValueError("rho must be >= 0")


@dataclass(frozen=True)
class RunResult:
    """Artifacts of a single adaptation run."""

    predictions: np.ndarray
    model: clf.LinearOvrModel
    anchor_labels: np.ndarray
    anchor_member_indices: list[np.ndarray]
    labeling: LabelingResult
    n_anchors: int


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregate of a multi-run experiment.

    ``per_run_accuracy`` is None when the target is unlabeled (predictions
    are still reported). The confusion matrix counts truth rows versus
    prediction columns for the last run. ``mean``/``std`` use the population
    convention (std is 0 for a single run).
    """

    per_run_accuracy: list[float] | None
    mean_accuracy: float | None
    std_accuracy: float | None
    confusion: list[list[int]] | None
    predictions: list[int]
    n_anchors: int
    labeling_converged: bool
    wall_time_s: float
    config: dict

    def to_json_dict(self) -> dict:
        payload = asdict(self)
        payload["schema_version"] = REPORT_SCHEMA_VERSION
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def evaluate(predictions, truth) -> tuple[float, np.ndarray]:
    """Accuracy and truth-by-prediction confusion counts."""
    pred = np.asarray(predictions, dtype=np.int64)
    true = np.asarray(truth, dtype=np.int64)
    if pred.shape != true.shape or pred.ndim != 1:
        raise LengthMismatch(
            f"predictions {pred.shape} vs truth {true.shape}")
    if pred.size == 0:
        raise LengthMismatch("empty prediction vector")
    n_classes = int(max(pred.max(), true.max())) + 1
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (true, pred), 1)
    accuracy = float(np.mean(pred == true))
    return accuracy, confusion


def adapt_once(source: DomainDataset, target: DomainDataset,
               config: PipelineConfig, seed: int) -> RunResult:
    """One pass of the five-stage adaptation on in-memory datasets."""
    sources = build_class_subspaces(source, rank_tol=config.rank_tol)
    params = ClusteringParams(gamma=config.gamma,
                              anchor_size=config.anchor_size, seed=seed)
    anchors = build_anchor_subspaces(target.features, params,
                                     rank_tol=config.rank_tol)
    affinities = build_affinities(sources, anchors, sigma=config.sigma)
    rho = resolve_rho(config.rho, len(sources), len(anchors))
    problem = LabelingProblem(affinities=affinities, rho=rho, mu=config.mu,
                              max_iter=config.max_iter, tol=config.tol)
    labeling = label_anchors_soft(problem)
    hard = discretize(labeling.y_soft)
    joint = clf.assemble_joint_subspaces(sources, anchors, hard)
    model = clf.train_ovr_svm(joint, source, target, reg_c=config.reg_c,
                              seed=seed)
    predictions = clf.predict(model, target.features)
    return RunResult(predictions=predictions, model=model,
                     anchor_labels=hard.argmax_labels(),
                     anchor_member_indices=[a.member_indices for a in anchors],
                     labeling=labeling, n_anchors=len(anchors))


def load_config_datasets(config: PipelineConfig) -> tuple[DomainDataset, DomainDataset]:
    """Load and merge the configured source and target datasets."""
    if not config.source_features:
        raise ValueError("at least one source dataset is required")
    if len(config.source_labels) != len(config.source_features):
        raise ValueError("every source needs a label file")
    if not config.target_features:
        raise ValueError("at least one target dataset is required")
    if config.target_labels and \
            len(config.target_labels) != len(config.target_features):
        raise ValueError("give target labels for all targets or none")
    sources = [load_dataset(f, l, domain_tag=f"source{i}",
                            one_based_labels=config.one_based_labels,
                            l2_normalize=config.l2_normalize)
               for i, (f, l) in enumerate(zip(config.source_features,
                                              config.source_labels))]
    targets = [load_dataset(f, config.target_labels[i] if config.target_labels
                            else None, domain_tag=f"target{i}",
                            one_based_labels=config.one_based_labels,
                            l2_normalize=config.l2_normalize)
               for i, f in enumerate(config.target_features)]
    return merge_domains(sources), merge_domains(targets)


def run_pipeline(config: PipelineConfig,
                 datasets: tuple[DomainDataset, DomainDataset] | None = None
                 ) -> EvaluationReport:
    """Run the full experiment and (optionally) write the JSON report.

    ``datasets`` short-circuits file loading for in-memory use; CLI and
    service calls go through the configured paths.
    """
    started = time.perf_counter()
    source, target = datasets if datasets is not None \
        else load_config_datasets(config)

    accuracies: list[float] = []
    confusion = None
    last: RunResult | None = None
    for run_index in range(config.runs):
        last = adapt_once(source, target, config, seed=config.seed + run_index)
        if target.labels is not None:
            accuracy, confusion = evaluate(last.predictions, target.labels)
            accuracies.append(accuracy)

    scored = target.labels is not None
    report = EvaluationReport(
        per_run_accuracy=[float(a) for a in accuracies] if scored else None,
        mean_accuracy=float(np.mean(accuracies)) if scored else None,
        std_accuracy=float(np.std(accuracies)) if scored else None,
        confusion=confusion.tolist() if confusion is not None else None,
        predictions=last.predictions.tolist(),
        n_anchors=last.n_anchors,
        labeling_converged=last.labeling.converged,
        wall_time_s=time.perf_counter() - started,
        config=_config_echo(config))
    if config.output:
        with open(config.output, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
    return report


def _config_echo(config: PipelineConfig) -> dict:
    echo = asdict(config)
    return {k: echo[k] for k in sorted(echo)}


def sweep(config: PipelineConfig, param: str, values: list) -> list[dict]:
    """Re-run the pipeline for each value of ``gamma`` or ``N`` (anchor size).

    Returns one row per value with the per-run mean and standard deviation;
    datasets are loaded once.
    """
    field_name = {"gamma": "gamma", "N": "anchor_size",
                  "anchor_size": "anchor_size"}.get(param)
    if field_name is None:
        raise ValueError(f"unknown sweep parameter {param!r}")
    datasets = load_config_datasets(config)
    rows = []
    for value in values:
        overrides = {field_name: int(value), "output": None}
        cfg = PipelineConfig(**{**asdict(config), **overrides})
        report = run_pipeline(cfg, datasets=datasets)
        rows.append({"param": param, "value": int(value),
                     "mean_accuracy": report.mean_accuracy,
                     "std_accuracy": report.std_accuracy})
    return rows


def sweep_rows_to_csv(rows: list[dict]) -> str:
    lines = ["param,value,mean_accuracy,std_accuracy"]
    for row in rows:
        mean = "" if row["mean_accuracy"] is None else repr(row["mean_accuracy"])
        std = "" if row["std_accuracy"] is None else repr(row["std_accuracy"])
        lines.append(f"{row['param']},{row['value']},{mean},{std}")
    return "\n".join(lines) + "\n"


def class_distance_matrix(source: DomainDataset, target: DomainDataset,
                          rank_tol: float = 1e-10) -> np.ndarray:
    """C x C matrix of subspace distances between source and target classes.

    Both datasets must be labeled; entry (i, j) is the distance between the
    source class-i subspace and the target class-j subspace. Row/column
    diagonal dominance (small diagonal) indicates that same-class subspaces
    stay closer across domains than cross-class ones.
    """
    if source.labels is None or target.labels is None:
        raise ValueError("both datasets must be labeled")
    n_classes = max(source.n_classes, target.n_classes)
    src = build_class_subspaces(source, n_classes, rank_tol=rank_tol)
    tgt = build_class_subspaces(target, n_classes, rank_tol=rank_tol)
    return pairwise_distances([s.basis for s in src], [t.basis for t in tgt])
