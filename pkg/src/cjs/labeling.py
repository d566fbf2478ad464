"""Anchor-subspace labeling by constrained graph-Laplacian minimization.

The source subspaces carry fixed one-hot codes (the identity matrix); the
anchors get relaxed codes Y' by minimizing the quadratic Laplacian cost of
the joint affinity graph subject to every code vector summing to one. The
constraint is handled with an augmented Lagrangian: each sweep solves a
structured Sylvester system for Y' and then performs a gradient-ascent
multiplier update with step mu. Finally the relaxed codes are discretized
per anchor by argmax.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import LabelMatrix
from .errors import DimensionMismatch
from .linalg import RankOneSylvesterSolver
from .subspaces import AffinityPair


@dataclass(frozen=True)
class JointAffinity:
    """Joint (C+K) x (C+K) affinity with its Laplacian.

    The block structure is ``[[I, a_st/2], [a_st.T/2, rho * a_tt]]``; the
    Laplacian is degree minus affinity, so its row sums vanish.
    """

    a: np.ndarray
    laplacian: np.ndarray
    degree: np.ndarray
    n_classes: int

    def laplacian_blocks(self):
        """Split the Laplacian along the C-th row and column.

        Returns (d_cc, d_ck, d_kc, d_kk).
        """
        c = self.n_classes
        lap = self.laplacian
        return lap[:c, :c], lap[:c, c:], lap[c:, :c], lap[c:, c:]


@dataclass(frozen=True)
class LabelingProblem:
    affinities: AffinityPair
    rho: float = 1.0
    mu: float = 1.0
    max_iter: int = 10000
    tol: float = 1e-6

    def __post_init__(self):
        if self.rho < 0.0:
            raise ValueError("rho must be >= 0")
        if self.mu <= 0.0:
            raise ValueError("mu must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class LabelingResult:
    """Relaxed anchor codes plus convergence telemetry."""

    y_soft: LabelMatrix
    iterations: int
    constraint_residual: float
    change_residual: float
    converged: bool


def assemble_joint_affinity(pair: AffinityPair, rho: float) -> JointAffinity:
    """Build the joint affinity block matrix and its graph Laplacian."""
    if rho < 0.0:
        raise ValueError("rho must be >= 0")
    n_classes, n_anchors = pair.a_st.shape
    total = n_classes + n_anchors
    a = np.zeros((total, total))
    a[:n_classes, :n_classes] = np.eye(n_classes)
    a[:n_classes, n_classes:] = pair.a_st / 2.0
    a[n_classes:, :n_classes] = pair.a_st.T / 2.0
    a[n_classes:, n_classes:] = rho * pair.a_tt
    degree = a.sum(axis=1)
    laplacian = np.diag(degree) - a
    return JointAffinity(a=a, laplacian=laplacian, degree=degree,
                         n_classes=n_classes)


def label_anchors_soft(problem: LabelingProblem,
                       y_source: LabelMatrix | None = None) -> LabelingResult:
    """Alternating solve for the relaxed anchor codes.

    Starting from zero codes and zero multipliers, each sweep solves

        Y' @ d_kk + mu 11^T Y' = mu 11^T - Y @ d_ck - 1 lambda2^T

    for the anchor block (a rank-one Sylvester system, factored once) and
    then updates the multipliers by ``lambda += mu * (col_sums - 1)``. The
    loop stops when both the constraint residual and the iterate change fall
    within ``tol``, or after ``max_iter`` sweeps (non-convergence is flagged
    on the result, not raised).
    """
    n_classes, n_anchors = problem.affinities.a_st.shape
    if y_source is None:
        y = np.eye(n_classes)
    else:
        y = y_source.codes
        if y.shape != (n_classes, n_classes) or not np.array_equal(
                y, np.eye(n_classes)):
            raise ValueError("source label codes must be the identity matrix")

    joint = assemble_joint_affinity(problem.affinities, problem.rho)
    _, d_ck, _, d_kk = joint.laplacian_blocks()
    solver = RankOneSylvesterSolver(d_kk, problem.mu, n_classes)

    ones_ck = np.ones((n_classes, n_anchors))
    rhs_fixed = problem.mu * ones_ck - y @ d_ck
    y_prime = np.zeros((n_classes, n_anchors))
    lam2 = np.zeros(n_anchors)

    iterations = 0
    constraint = np.inf
    change = np.inf
    converged = False
    for iterations in range(1, problem.max_iter + 1):
        y_next = solver.solve(rhs_fixed - lam2[None, :])
        residual = y_next.sum(axis=0) - 1.0
        lam2 = lam2 + problem.mu * residual
        constraint = float(np.abs(residual).max())
        change = float(np.abs(y_next - y_prime).max())
        y_prime = y_next
        if constraint <= problem.tol and change <= problem.tol:
            converged = True
            break
    return LabelingResult(
        y_soft=LabelMatrix(y_prime, hard=False),
        iterations=iterations,
        constraint_residual=constraint,
        change_residual=change,
        converged=converged)


def discretize(y_soft: LabelMatrix | np.ndarray) -> LabelMatrix:
    """Hard labels from relaxed codes: per anchor, the maximal entry wins.

    Ties resolve to the lowest class index. A column with no distinguishing
    information (all entries equal, e.g. all zero) falls back to class 0 and
    triggers a RuntimeWarning, since it usually signals a non-converged
    relaxation.
    """
    codes = y_soft.codes if isinstance(y_soft, LabelMatrix) else np.asarray(
        y_soft, dtype=np.float64)
    if codes.ndim != 2:
        raise ValueError("label codes must be 2-D")
    if codes.size and not np.isfinite(codes).all():
        raise ValueError("label codes contain non-finite entries")
    degenerate = np.flatnonzero(codes.max(axis=0) == codes.min(axis=0))
    if degenerate.size:
        warnings.warn(
            f"{degenerate.size} anchor column(s) carry no label information "
            f"(columns {degenerate.tolist()}); assigning class 0",
            RuntimeWarning, stacklevel=2)
    winners = np.argmax(codes, axis=0)
    hard = np.zeros_like(codes)
    hard[winners, np.arange(codes.shape[1])] = 1.0
    return LabelMatrix(hard, hard=True)


def labeling_cost(a_st: np.ndarray, a_tt: np.ndarray, rho: float,
                  y_prime: np.ndarray,
                  y_source: np.ndarray | None = None) -> float:
    """Quadratic assignment cost of anchor codes.

    Sum over source/anchor pairs of ``||y_i - y'_j||^2 a_st[i, j]`` plus
    ``rho`` times the sum over anchor pairs of ``||y'_j - y'_j'||^2
    a_tt[j, j']``. Accepts hard or relaxed codes; used by the optimality
    tests and exposed for diagnostics.
    """
    a_st = np.asarray(a_st, dtype=np.float64)
    a_tt = np.asarray(a_tt, dtype=np.float64)
    yp = np.asarray(y_prime, dtype=np.float64)
    n_classes, n_anchors = a_st.shape
    ys = np.eye(n_classes) if y_source is None else np.asarray(y_source, float)
    if yp.shape != (n_classes, n_anchors):
        raise DimensionMismatch(
            f"anchor codes must be {(n_classes, n_anchors)}, got {yp.shape}")
    # ||u - v||^2 summed against an affinity matrix, vectorized via Gram terms
    sq_s = np.einsum("ij,ij->j", ys, ys)
    sq_p = np.einsum("ij,ij->j", yp, yp)
    cross = ys.T @ yp
    d2_st = sq_s[:, None] + sq_p[None, :] - 2.0 * cross
    cross_tt = yp.T @ yp
    d2_tt = sq_p[:, None] + sq_p[None, :] - 2.0 * cross_tt
    return float(np.sum(d2_st * a_st) + rho * np.sum(d2_tt * a_tt))


def resolve_rho(rho: float | None, n_classes: int, n_anchors: int) -> float:
    """Default topology weight: balance the two cost terms.

    The cross-domain term has C*K affinity entries and the within-target
    term K*K, so ``rho = C / K`` puts their totals on the same scale. A
    fixed value is passed through unchanged.
    """
    if rho is not None:
        return float(rho)
    return n_classes / max(1, n_anchors)
