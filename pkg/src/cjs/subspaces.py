"""Per-class subspaces, subspace distances, and Gaussian affinities.

The distance between two subspaces is the sum of the sines of their
principal angles, truncated at the smaller of the two effective ranks. The
affinity matrices apply ``exp(-D / (2 sigma^2))`` entrywise, with sigma
defaulting to the median of the raw distances entering each matrix
(computed separately for the source-target and target-target matrices).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import AnchorSubspace
from .data import DomainDataset
from .errors import EmptyClass
from .linalg import orthonormal_basis, principal_sines


@dataclass(frozen=True)
class SourceSubspace:
    """All source samples of one class, treated as an over-complete span."""

    class_index: int
    member_indices: np.ndarray
    samples: np.ndarray
    basis: np.ndarray


@dataclass(frozen=True)
class AffinityPair:
    """Affinities between source/anchor subspaces (a_st) and among anchors (a_tt).

    The raw distance matrices and the two bandwidths are kept for
    diagnostics. a_tt is symmetric with unit diagonal (self-distance is
    forced to zero).
    """

    a_st: np.ndarray
    a_tt: np.ndarray
    sigma_st: float
    sigma_tt: float
    d_st: np.ndarray
    d_tt: np.ndarray


def build_class_subspaces(dataset: DomainDataset, n_classes: int | None = None,
                          rank_tol: float = 1e-10) -> list[SourceSubspace]:
    """One subspace per class from a labeled dataset.

    Raises ``EmptyClass`` if any class index in [0, n_classes) has no
    samples; n_classes defaults to max label + 1.
    """
    if dataset.labels is None:
        raise ValueError("dataset must be labeled")
    n_classes = dataset.n_classes if n_classes is None else n_classes
    if n_classes < 1:
        raise EmptyClass("no classes present")
    out = []
    for c in range(n_classes):
        members = np.flatnonzero(dataset.labels == c)
        if members.size == 0:
            raise EmptyClass(f"class {c} has no samples")
        samples = dataset.features[:, members]
        out.append(SourceSubspace(
            class_index=c,
            member_indices=members,
            samples=samples,
            basis=orthonormal_basis(samples, rank_tol=rank_tol)))
    return out


def subspace_distance(basis1: np.ndarray, basis2: np.ndarray) -> float:
    """Sum of principal sines between two subspaces (0 <= D <= min rank)."""
    return float(principal_sines(basis1, basis2).sum())


def pairwise_distances(bases_a: list[np.ndarray],
                       bases_b: list[np.ndarray]) -> np.ndarray:
    """Dense |A| x |B| matrix of subspace distances."""
    out = np.empty((len(bases_a), len(bases_b)))
    for i, ba in enumerate(bases_a):
        for j, bb in enumerate(bases_b):
            out[i, j] = subspace_distance(ba, bb)
    return out


def symmetric_distances(bases: list[np.ndarray]) -> np.ndarray:
    """Symmetric pairwise distance matrix with an exactly zero diagonal."""
    k = len(bases)
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = subspace_distance(bases[i], bases[j])
    return out


def median_sigma(distances: np.ndarray) -> float:
    """Median of the raw distances; falls back to the median of the positive
    ones (or 1.0) when the median itself is zero, so the bandwidth stays
    usable on degenerate inputs."""
    d = np.asarray(distances, dtype=np.float64).ravel()
    if d.size == 0:
        return 1.0
    med = float(np.median(d))
    if med > 0.0:
        return med
    positive = d[d > 0.0]
    return float(np.median(positive)) if positive.size else 1.0


def build_affinities(sources: list[SourceSubspace],
                     anchors: list[AnchorSubspace],
                     sigma: float | None = None) -> AffinityPair:
    """Affinity pair from per-class source subspaces and anchor subspaces.

    ``sigma`` fixes one bandwidth for both matrices; when None, each matrix
    uses the median of its own raw distances (for a_tt, the off-diagonal
    entries). Diagonal a_tt entries are exactly 1.
    """
    if not sources or not anchors:
        raise ValueError("need at least one source subspace and one anchor")
    if sigma is not None and sigma <= 0.0:
        raise ValueError("sigma must be positive")
    src_bases = [s.basis for s in sources]
    anc_bases = [a.basis for a in anchors]
    d_st = pairwise_distances(src_bases, anc_bases)
    d_tt = symmetric_distances(anc_bases)
    k = len(anchors)
    if sigma is not None:
        sigma_st = sigma_tt = float(sigma)
    else:
        sigma_st = median_sigma(d_st)
        sigma_tt = median_sigma(d_tt[np.triu_indices(k, 1)]) if k > 1 else 1.0
    a_st = np.exp(-d_st / (2.0 * sigma_st**2))
    a_tt = np.exp(-d_tt / (2.0 * sigma_tt**2))
    np.fill_diagonal(a_tt, 1.0)
    return AffinityPair(a_st=a_st, a_tt=a_tt, sigma_st=sigma_st,
                        sigma_tt=sigma_tt, d_st=d_st, d_tt=d_tt)
