"""Numerical kernels: orthonormal bases, principal sines, structured Sylvester.

The Sylvester solve handles the specific equation

    X @ A + mu * ones((C, C)) @ X = RHS,          A symmetric, mu > 0,

whose left operator is a rank-one perturbation acting on the row space.
Diagonalizing A = Q diag(lam) Q^T once reduces each transformed column k to
``(lam_k I + mu 11^T) w = r``, solved in closed form by Sherman-Morrison.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SingularSystem, ZeroMatrix


def orthonormal_basis(samples: np.ndarray, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span of ``samples``.

    Computed from the singular value decomposition; directions with singular
    value <= ``rank_tol`` times the largest singular value are dropped, which
    gives a principled numerical-rank cut.

    Parameters
    ----------
    samples : (d, m) array with at least one column.
    rank_tol : relative singular-value threshold.

    Returns
    -------
    (d, r) array with orthonormal columns spanning the same subspace.
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"need a (d, m) matrix with m >= 1, got {arr.shape}")
    u, s, _ = np.linalg.svd(arr, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise ZeroMatrix("all columns are numerically zero")
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    return u[:, :rank]


def principal_sines(basis1: np.ndarray, basis2: np.ndarray) -> np.ndarray:
    """Sines of the principal angles between two orthonormal bases.

    The cosines are the singular values of ``basis1.T @ basis2``, clamped to
    [0, 1] to absorb roundoff above one. Returns ``min(r1, r2)`` sines sorted
    ascending (angles ascending).
    """
    b1 = np.asarray(basis1, dtype=np.float64)
    b2 = np.asarray(basis2, dtype=np.float64)
    if b1.shape[0] != b2.shape[0]:
        raise DimensionMismatch(
            f"ambient dimensions differ: {b1.shape[0]} vs {b2.shape[0]}")
    cosines = np.linalg.svd(b1.T @ b2, compute_uv=False)
    cosines = np.clip(cosines, 0.0, 1.0)
    sines = np.sqrt(np.maximum(0.0, 1.0 - cosines * cosines))
    return np.sort(sines)


class RankOneSylvesterSolver:
    """Factored solver for ``X @ A + mu * 11^T @ X = RHS`` with fixed A, mu, C.

    The eigendecomposition of the symmetric A is computed once; each ``solve``
    is then O(C K^2). The operator is singular exactly when some eigenvalue
    of A equals the negative of an eigenvalue of ``mu 11^T`` (those are mu*C
    and 0), which is checked up front.
    """

    def __init__(self, a: np.ndarray, mu: float, n_rows: int,
                 sing_tol: float = 1e-12):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"A must be square, got {a.shape}")
        if mu <= 0.0:
            raise ValueError("mu must be positive")
        if n_rows < 1:
            raise ValueError("n_rows must be >= 1")
        self.mu = float(mu)
        self.n_rows = int(n_rows)
        self.eigvals, self.eigvecs = np.linalg.eigh(a)
        scale = max(float(np.abs(self.eigvals).max()), self.mu * self.n_rows)
        bad = (np.abs(self.eigvals) <= sing_tol * scale) \
            | (np.abs(self.eigvals + self.mu * self.n_rows) <= sing_tol * scale)
        if bad.any():
            raise SingularSystem(
                "operator eigenvalue within tolerance of an eigenvalue of "
                f"-mu*11^T (mu={mu}, offending A eigenvalues "
                f"{self.eigvals[bad]})")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.n_rows, self.eigvals.shape[0]):
            raise DimensionMismatch(
                f"rhs must be {(self.n_rows, self.eigvals.shape[0])}, "
                f"got {rhs.shape}")
        rt = rhs @ self.eigvecs
        shrink = self.mu * rt.sum(axis=0) / (self.eigvals + self.mu * self.n_rows)
        w = (rt - shrink[None, :]) / self.eigvals[None, :]
        return w @ self.eigvecs.T


def solve_rank1_sylvester(delta_kk: np.ndarray, mu: float,
                          rhs: np.ndarray) -> np.ndarray:
    """One-shot solve of ``X @ delta_kk + mu * 11^T @ X = rhs``.

    ``delta_kk`` must be symmetric (K x K); ``rhs`` is C x K. Raises
    ``SingularSystem`` when the operator is numerically singular.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.ndim != 2:
        raise ValueError("rhs must be 2-D")
    solver = RankOneSylvesterSolver(delta_kk, mu, rhs.shape[0])
    return solver.solve(rhs)


def solve_sylvester_dense(delta_kk: np.ndarray, mu: float,
                          rhs: np.ndarray) -> np.ndarray:
    """Dense Bartels-Stewart fallback for the same equation (regression oracle)."""
    rhs = np.asarray(rhs, dtype=np.float64)
    n_rows = rhs.shape[0]
    left = np.full((n_rows, n_rows), float(mu))
    return scipy.linalg.solve_sylvester(left, np.asarray(delta_kk, float), rhs)
