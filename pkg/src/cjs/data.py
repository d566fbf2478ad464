"""Core domain types and dataset I/O.

Feature matrices are dense float64 arrays of shape ``(d, n)`` with samples as
columns. CSV files on disk store one sample per row and are transposed on
load. An optional header line is auto-detected (first row non-numeric).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (DimensionMismatch, LabelLengthMismatch, LabelOutOfRange,
                     MixedLabeling, ParseError)


def check_feature_matrix(data: np.ndarray) -> np.ndarray:
    """Validate and return a (d, n) float64 feature matrix.

    Raises ``ParseError`` on non-finite entries and ``ValueError`` on bad
    shapes (d must be >= 1).
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("feature dimension must be >= 1")
    if arr.size and not np.isfinite(arr).all():
        raise ParseError("feature matrix contains non-finite entries")
    return arr


@dataclass(frozen=True)
class DomainDataset:
    """A feature matrix plus optional per-sample class labels and a domain tag.

    ``features`` has shape (d, n); ``labels`` (when present) has shape (n,)
    with 0-based class indices.
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    domain_tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "features", check_feature_matrix(self.features))
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.ndim != 1:
                raise ValueError("labels must be a 1-D vector")
            if lab.shape[0] != self.features.shape[1]:
                raise LabelLengthMismatch(
                    f"{lab.shape[0]} labels for {self.features.shape[1]} samples")
            if lab.size and lab.min() < 0:
                raise LabelOutOfRange(f"negative label {lab.min()}")
            object.__setattr__(self, "labels", lab)

    @property
    def dim(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        """Inferred class count (max label + 1); 0 when unlabeled/empty."""
        if self.labels is None or self.labels.size == 0:
            return 0
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class LabelMatrix:
    """C x m matrix of label codes, one code vector per column.

    Hard matrices are one-hot per column; soft matrices hold the relaxed
    codes produced by the anchor-labeling solve (columns sum to ~1 at
    convergence, but this is not enforced here).
    """

    codes: np.ndarray
    hard: bool = True

    def __post_init__(self):
        arr = np.asarray(self.codes, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("label codes must be 2-D")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("label codes contain non-finite entries")
        if self.hard and arr.size:
            is01 = np.all((arr == 0.0) | (arr == 1.0))
            if not is01 or not np.all(arr.sum(axis=0) == 1.0):
                raise ValueError("hard label matrix must have one-hot columns")
        object.__setattr__(self, "codes", arr)

    @property
    def n_classes(self) -> int:
        return self.codes.shape[0]

    @property
    def n_items(self) -> int:
        return self.codes.shape[1]

    def argmax_labels(self) -> np.ndarray:
        """Per-column argmax (ties resolved to the lowest class index)."""
        return np.argmax(self.codes, axis=0).astype(np.int64)


def one_hot_encode(labels, n_classes: int) -> LabelMatrix:
    """Encode integer class labels as a hard C x m label matrix."""
    lab = np.asarray(labels, dtype=np.int64)
    if lab.ndim != 1:
        raise ValueError("labels must be a 1-D vector")
    if lab.size and (lab.min() < 0 or lab.max() >= n_classes):
        raise LabelOutOfRange(
            f"labels must lie in [0, {n_classes}), got range "
            f"[{lab.min()}, {lab.max()}]")
    codes = np.zeros((n_classes, lab.shape[0]))
    codes[lab, np.arange(lab.shape[0])] = 1.0
    return LabelMatrix(codes, hard=True)


def _parse_float_token(token: str, where: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric token {token!r} {where}") from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r} {where}")
    return value


def _looks_like_header(tokens: list[str]) -> bool:
    for tok in tokens:
        try:
            float(tok)
        except ValueError:
            return True
    return False


def load_feature_csv(path) -> np.ndarray:
    """Read a CSV of one sample per row into a (d, n) matrix.

    The first line is skipped if any of its tokens is non-numeric. Rows must
    all have the same arity; values must be finite.
    """
    rows: list[list[float]] = []
    arity = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = [t.strip() for t in line.split(",")]
            if arity is None and _looks_like_header(tokens):
                continue
            if arity is None:
                arity = len(tokens)
            elif len(tokens) != arity:
                raise ParseError(
                    f"row with {len(tokens)} fields at line {lineno} of {path} "
                    f"(expected {arity})")
            rows.append([_parse_float_token(t, f"at line {lineno} of {path}")
                         for t in tokens])
    if not rows:
        raise ParseError(f"no data rows in {path}")
    return np.asarray(rows, dtype=np.float64).T


def load_labels(path, one_based: bool = False) -> np.ndarray:
    """Read one integer class label per line; optionally shift 1-based files."""
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ParseError(
                    f"non-integer label {line!r} at line {lineno} of {path}"
                ) from None
    lab = np.asarray(values, dtype=np.int64)
    if one_based:
        lab = lab - 1
    if lab.size and lab.min() < 0:
        raise LabelOutOfRange(
            f"label {lab.min()} below 0 in {path}"
            + ("" if one_based else " (is the file 1-based?)"))
    return lab


def load_dataset(features_path, labels_path=None, domain_tag: str = "",
                 one_based_labels: bool = False,
                 l2_normalize: bool = False) -> DomainDataset:
    """Load a dataset from a feature CSV and an optional label file.

    ``l2_normalize`` rescales every sample column to unit Euclidean norm
    (zero columns are left untouched); off by default.
    """
    features = load_feature_csv(features_path)
    if l2_normalize:
        norms = np.linalg.norm(features, axis=0)
        safe = np.where(norms > 0.0, norms, 1.0)
        features = features / safe
    labels = None
    if labels_path is not None:
        labels = load_labels(labels_path, one_based=one_based_labels)
        if labels.shape[0] != features.shape[1]:
            raise LabelLengthMismatch(
                f"{labels.shape[0]} labels in {labels_path} for "
                f"{features.shape[1]} samples in {features_path}")
    return DomainDataset(features=features, labels=labels, domain_tag=domain_tag)


def save_dataset(dataset: DomainDataset, features_path, labels_path=None) -> None:
    """Write a dataset back to disk (one sample per row, %.17g precision)."""
    np.savetxt(features_path, dataset.features.T, fmt="%.17g", delimiter=",")
    if labels_path is not None:
        if dataset.labels is None:
            raise ValueError("dataset has no labels to save")
        np.savetxt(labels_path, dataset.labels, fmt="%d")


def merge_domains(datasets: list[DomainDataset]) -> DomainDataset:
    """Concatenate datasets column-wise, preserving sample order.

    All datasets must share the feature dimension and be either all labeled
    or all unlabeled.
    """
    if not datasets:
        raise ValueError("nothing to merge")
    if len(datasets) == 1:
        return replace(datasets[0])
    dims = {ds.dim for ds in datasets}
    if len(dims) != 1:
        raise DimensionMismatch(f"feature dimensions differ: {sorted(dims)}")
    labeled = [ds.labels is not None for ds in datasets]
    if any(labeled) and not all(labeled):
        raise MixedLabeling("cannot merge labeled with unlabeled datasets")
    features = np.hstack([ds.features for ds in datasets])
    labels = None
    if all(labeled):
        labels = np.concatenate([ds.labels for ds in datasets])
    tag = "+".join(ds.domain_tag for ds in datasets if ds.domain_tag)
    return DomainDataset(features=features, labels=labels, domain_tag=tag)
