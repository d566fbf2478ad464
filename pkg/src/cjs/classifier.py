"""Compact joint subspaces and one-vs-rest linear SVM training.

Each class's compact joint subspace pools the source samples of that class
with the member samples of every anchor assigned to it. The per-class
binary SVMs minimize the averaged hinge loss plus ``||w||^2 / (2 reg_c)``
with a deterministic dual coordinate-descent scheme (fixed-seed epoch
ordering, duality-gap stopping). The bias is learned through an appended
constant feature, so it is mildly regularized like the weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import AnchorSubspace
from .data import DomainDataset, LabelMatrix
from .errors import DimensionMismatch, EmptyClass, SolverFailure
from .subspaces import SourceSubspace

SVM_MAX_EPOCHS = 5000
SVM_GAP_TOL = 1e-6


@dataclass(frozen=True)
class CompactJointSubspace:
    """Per-class union of source members and same-labeled anchor members.

    Indices refer to the source and target datasets respectively.
    """

    class_index: int
    source_members: np.ndarray
    anchor_members: np.ndarray


@dataclass(frozen=True)
class LinearOvrModel:
    """One-vs-rest linear model: one weight row and bias per class."""

    weights: np.ndarray
    biases: np.ndarray
    reg_c: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.biases, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise ValueError("weights must be (C, d) with a length-C bias vector")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def assemble_joint_subspaces(sources: list[SourceSubspace],
                             anchors: list[AnchorSubspace],
                             anchor_labels: LabelMatrix) -> list[CompactJointSubspace]:
    """Collect, per class, the source members and the matching anchors' members.

    ``anchor_labels`` must be hard with one column per anchor. Classes with
    no anchors keep their source members only.
    """
    if not anchor_labels.hard:
        raise ValueError("anchor labels must be hard")
    if anchor_labels.n_items != len(anchors):
        raise DimensionMismatch(
            f"{anchor_labels.n_items} label columns for {len(anchors)} anchors")
    assigned = anchor_labels.argmax_labels()
    out = []
    for sub in sources:
        mine = [anchors[j].member_indices
                for j in np.flatnonzero(assigned == sub.class_index)]
        anchor_members = (np.concatenate(mine) if mine
                          else np.empty(0, dtype=np.int64))
        out.append(CompactJointSubspace(
            class_index=sub.class_index,
            source_members=np.asarray(sub.member_indices, dtype=np.int64),
            anchor_members=anchor_members))
    return out


def _dual_cd_binary(x_rows: np.ndarray, y_signs: np.ndarray, reg_c: float,
                    seed: int, gap_tol: float, max_epochs: int) -> np.ndarray:
    """Dual coordinate descent for one binary averaged-hinge SVM.

    ``x_rows`` is (n, d+1) with the constant bias column appended; returns
    the (d+1,) weight vector. Box bound is reg_c / n so duplicating the
    training set leaves the optimum unchanged.
    """
    if max_epochs < 1:
        raise ValueError("max_epochs must be >= 1")
    n = x_rows.shape[0]
    box = reg_c / n
    alpha = np.zeros(n)
    w = np.zeros(x_rows.shape[1])
    diag = np.einsum("ij,ij->i", x_rows, x_rows)
    rng = np.random.default_rng(seed)
    for _ in range(max_epochs):
        for i in rng.permutation(n):
            grad = y_signs[i] * (x_rows[i] @ w) - 1.0
            a = alpha[i]
            if (a <= 0.0 and grad >= 0.0) or (a >= box and grad <= 0.0) \
                    or diag[i] <= 0.0:
                continue
            a_new = min(max(a - grad / diag[i], 0.0), box)
            if a_new != a:
                w += (a_new - a) * y_signs[i] * x_rows[i]
                alpha[i] = a_new
        margins = 1.0 - y_signs * (x_rows @ w)
        primal = 0.5 * (w @ w) + box * np.maximum(margins, 0.0).sum()
        dual = alpha.sum() - 0.5 * (w @ w)
        if primal - dual <= gap_tol * max(1.0, abs(primal)):
            return w
    raise SolverFailure(
        f"duality gap {primal - dual:.3e} above tolerance after "
        f"{max_epochs} epochs")


def train_ovr_svm(joint: list[CompactJointSubspace], source: DomainDataset,
                  target: DomainDataset, reg_c: float = 1.0, seed: int = 0,
                  gap_tol: float = SVM_GAP_TOL,
                  max_epochs: int = SVM_MAX_EPOCHS) -> LinearOvrModel:
    """Train one-vs-rest linear SVMs on the joint-subspace member samples.

    Positives for class c are the members of that class's joint subspace
    (source plus anchor samples); negatives are the members of all the
    others. Deterministic given ``seed``.
    """
    if reg_c <= 0.0:
        raise ValueError("reg_c must be positive")
    if source.dim != target.dim:
        raise DimensionMismatch(
            f"source dim {source.dim} != target dim {target.dim}")
    blocks = []
    labels = []
    for sub in joint:
        cols = []
        if sub.source_members.size:
            cols.append(source.features[:, sub.source_members])
        if sub.anchor_members.size:
            cols.append(target.features[:, sub.anchor_members])
        if not cols:
            raise EmptyClass(f"class {sub.class_index} has no member samples")
        members = np.hstack(cols)
        blocks.append(members)
        labels.append(np.full(members.shape[1], sub.class_index))
    x_rows = np.hstack(blocks).T
    y = np.concatenate(labels)
    x_aug = np.hstack([x_rows, np.ones((x_rows.shape[0], 1))])

    n_classes = len(joint)
    weights = np.zeros((n_classes, source.dim))
    biases = np.zeros(n_classes)
    for c, sub in enumerate(joint):
        signs = np.where(y == sub.class_index, 1.0, -1.0)
        w = _dual_cd_binary(x_aug, signs, reg_c, seed + c, gap_tol, max_epochs)
        weights[c] = w[:-1]
        biases[c] = w[-1]
    return LinearOvrModel(weights=weights, biases=biases, reg_c=reg_c)


def predict(model: LinearOvrModel, features: np.ndarray) -> np.ndarray:
    """Argmax class per sample column; ties resolve to the lowest index."""
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] != model.dim:
        raise DimensionMismatch(
            f"features must be ({model.dim}, m), got {feats.shape}")
    scores = model.weights @ feats + model.biases[:, None]
    return np.argmax(scores, axis=0).astype(np.int64)


MODEL_FORMAT_VERSION = 1


def save_model(model: LinearOvrModel, path) -> None:
    """Serialize the model to a flat npz archive with a version header."""
    with open(path, "wb") as handle:
        np.savez(handle, format_version=np.int64(MODEL_FORMAT_VERSION),
                 weights=model.weights, biases=model.biases,
                 reg_c=np.float64(model.reg_c))


def load_model(path) -> LinearOvrModel:
    with np.load(path) as archive:
        version = int(archive["format_version"])
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        return LinearOvrModel(weights=archive["weights"],
                              biases=archive["biases"],
                              reg_c=float(archive["reg_c"]))
