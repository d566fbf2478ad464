"""Anchor-subspace mining in the target domain.

K-means partitions the unlabeled target samples into a large number of
groups; inside every group that is big enough, the most compact core
subgroup (a sample plus its nearest in-group neighbors) spans one anchor
subspace. Groups smaller than the anchor size yield no anchor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import NoAnchors, TooManyClusters
from .linalg import orthonormal_basis


@dataclass(frozen=True)
class ClusteringParams:
    """Knobs for anchor mining.

    gamma is the desired average k-means group size (group count is
    round(n_target / gamma), at least 1); anchor_size is the number of
    samples per anchor subspace.
    """

    gamma: int = 20
    anchor_size: int = 5
    seed: int = 0
    max_kmeans_iters: int = 100

    def __post_init__(self):
        if self.anchor_size < 2:
            raise ValueError("anchor_size must be >= 2")
        if self.gamma < self.anchor_size:
            raise ValueError("gamma must be >= anchor_size, otherwise most "
                             "groups yield no anchor")
        if self.max_kmeans_iters < 1:
            raise ValueError("max_kmeans_iters must be >= 1")


@dataclass(frozen=True)
class AnchorSubspace:
    """An anchor: member sample indices, their columns, and a cached basis."""

    member_indices: np.ndarray
    samples: np.ndarray
    basis: np.ndarray


def kmeans(features: np.ndarray, n_groups: int, seed: int = 0,
           max_iters: int = 100) -> np.ndarray:
    """Deterministic k-means on sample columns.

    Seeding spreads the initial centers proportionally to squared distance
    from the ones already chosen, driven by ``seed``. Lloyd iterations stop
    at an assignment fixpoint or after ``max_iters``. Clusters that lose all
    members are dropped (no re-seeding), so the returned assignment uses
    compact group ids ``0..G-1`` with G <= n_groups.
    """
    pts = np.asarray(features, dtype=np.float64).T
    n = pts.shape[0]
    if n_groups > n:
        raise TooManyClusters(f"{n_groups} groups requested for {n} samples")
    if n_groups < 1:
        raise ValueError("n_groups must be >= 1")
    rng = np.random.default_rng(seed)

    centers = pts[int(rng.integers(n))][None, :]
    for _ in range(1, n_groups):
        d2 = cdist(pts, centers, "sqeuclidean").min(axis=1)
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers = np.vstack([centers, pts[idx]])

    assign = None
    for _ in range(max_iters):
        new_assign = np.argmin(cdist(pts, centers, "sqeuclidean"), axis=1)
        kept = np.unique(new_assign)
        centers = np.stack([pts[new_assign == g].mean(axis=0) for g in kept])
        remap = np.zeros(int(kept.max()) + 1, dtype=np.int64)
        remap[kept] = np.arange(kept.shape[0])
        new_assign = remap[new_assign]
        if assign is not None and assign.shape == new_assign.shape \
                and np.array_equal(assign, new_assign):
            break
        assign = new_assign
    return assign


def core_subgroup(group_features: np.ndarray, anchor_size: int) -> np.ndarray | None:
    """Indices (into the group's columns) of the most compact core subgroup.

    The center is the sample minimizing the summed Euclidean distance to its
    ``anchor_size - 1`` nearest in-group neighbors; the subgroup is the
    center plus those neighbors. Returns None when the group is smaller than
    ``anchor_size``. Neighbor and center ties resolve to the lowest index,
    making the selection deterministic. The result is sorted ascending.
    """
    pts = np.asarray(group_features, dtype=np.float64)
    m = pts.shape[1]
    if m < anchor_size:
        return None
    dist = cdist(pts.T, pts.T)
    np.fill_diagonal(dist, np.inf)
    nearest = np.sort(dist, axis=1)[:, :anchor_size - 1]
    costs = nearest.sum(axis=1)
    center = int(np.argmin(costs))
    neighbors = np.argsort(dist[center], kind="stable")[:anchor_size - 1]
    return np.sort(np.concatenate(([center], neighbors)))


def build_anchor_subspaces(features: np.ndarray, params: ClusteringParams,
                           rank_tol: float = 1e-10) -> list[AnchorSubspace]:
    """Mine anchor subspaces from the (d, n_target) unlabeled feature matrix.

    Raises ``NoAnchors`` when no k-means group reaches ``anchor_size``
    members (including the degenerate case n_target < anchor_size).
    """
    feats = np.asarray(features, dtype=np.float64)
    n_target = feats.shape[1]
    if n_target < params.anchor_size:
        raise NoAnchors(f"{n_target} target samples but anchors need "
                        f"{params.anchor_size}")
    n_groups = max(1, round(n_target / params.gamma))
    assign = kmeans(feats, n_groups, seed=params.seed,
                    max_iters=params.max_kmeans_iters)
    anchors = []
    for group in range(int(assign.max()) + 1):
        idx = np.flatnonzero(assign == group)
        local = core_subgroup(feats[:, idx], params.anchor_size)
        if local is None:
            continue
        members = idx[local]
        samples = feats[:, members]
        anchors.append(AnchorSubspace(
            member_indices=members,
            samples=samples,
            basis=orthonormal_basis(samples, rank_tol=rank_tol)))
    if not anchors:
        raise NoAnchors("every k-means group is smaller than anchor_size")
    return anchors
