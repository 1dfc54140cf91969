"""Affinity graphs and their Laplacians."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, NumericalError
from .linalg import as_matrix


def knn_affinity(X, m: int = 7, l: int = 5) -> np.ndarray:
    """Gaussian kNN affinity with per-point bandwidth.

    ``X`` is d x n (points are columns). Row ``i`` holds
    ``exp(-||x_i - x_j||^2 / sigma_i^2)`` for the ``m`` nearest neighbours
    ``x_j`` of ``x_i`` (``x_i`` itself excluded, ties broken by smaller
    index) where ``sigma_i`` is the distance to the ``l``-th neighbour.
    A zero ``sigma_i`` falls back to the smallest positive neighbour
    distance, or 1 when every neighbour coincides with ``x_i``.
    """
    X = as_matrix(X, "X")
    n = X.shape[1]
    if n <= m:
        raise DataError(f"need more than m={m} points for the kNN graph, got n={n}")
    if not 1 <= l <= m:
        raise DataError(f"need 1 <= l <= m, got l={l}, m={m}")
    sq = cdist(X.T, X.T, "sqeuclidean")
    W = np.zeros((n, n))
    idx = np.arange(n)
    for i in range(n):
        d = sq[i]
        order = np.lexsort((idx, d))
        nbrs = order[order != i][:m]
        nd = d[nbrs]
        sigma2 = nd[l - 1]
        if sigma2 <= 0.0:
            positive = nd[nd > 0.0]
            sigma2 = positive.min() if positive.size else 1.0
        W[i, nbrs] = np.exp(-nd / sigma2)
    return W


def _sym_abs(S: np.ndarray) -> np.ndarray:
    a = np.abs(S)
    return 0.5 * (a + a.T)


def laplacian(S) -> np.ndarray:
    """``D - (|S| + |S|^T)/2`` with ``D`` the degrees of the symmetrized ``|S|``."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"S must be square, got shape {S.shape}")
    A = _sym_abs(S)
    L = -A
    L[np.diag_indices_from(L)] += A.sum(axis=1)
    return L


def normalized_laplacian(S) -> np.ndarray:
    """``D^{-1/2} L_S D^{-1/2}``; raises on a zero-degree vertex."""
    L = laplacian(S)
    deg = _sym_abs(np.asarray(S, dtype=np.float64)).sum(axis=1)
    isolated = np.flatnonzero(deg <= 0.0)
    if isolated.size:
        raise NumericalError(
            f"vertex {int(isolated[0])} has zero degree; normalized Laplacian undefined"
        )
    s = 1.0 / np.sqrt(deg)
    N = s[:, None] * L * s[None, :]
    return 0.5 * (N + N.T)


def column_max_scale(Z) -> np.ndarray:
    """``|z_i| / ||z_i||_inf`` column by column; zero columns stay zero."""
    a = np.abs(np.asarray(Z, dtype=np.float64))
    peak = a.max(axis=0) if a.size else np.zeros(a.shape[1])
    scale = np.divide(1.0, peak, out=np.zeros_like(peak), where=peak > 0)
    return a * scale[None, :]


def fuse_affinity(Z, W, M, alpha1: float, alpha2: float, lam_m: float, normalize: bool = False):
    """Combined affinity ``alpha1 |Z| + alpha2 (W + lam_m M)``.

    With ``normalize`` each column of ``|Z|`` is first divided by its max.
    """
    Z, W, M = (np.asarray(a, dtype=np.float64) for a in (Z, W, M))
    if not (Z.shape == W.shape == M.shape) or Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ValueError(f"shape mismatch: Z {Z.shape}, W {W.shape}, M {M.shape}")
    absZ = column_max_scale(Z) if normalize else np.abs(Z)
    return alpha1 * absZ + alpha2 * (W + lam_m * M)


def trace_quad(H, L) -> float:
    """``Tr(H L H^T)`` without forming the k x k product."""
    return float(np.einsum("ij,ij->", H @ L, H))
