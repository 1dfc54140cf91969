"""Self-representation subproblems: the ridge-coupled A step and the
weighted soft-threshold Z step."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import NumericalError
from .graph import column_max_scale, laplacian, trace_quad
from .linalg import spd_solve

DEN_EPS = 1e-12


def update_A(X, Z, lam: float, gram=None) -> np.ndarray:
    """Minimizer of ``0.5||X - XA||^2 + lam/2 ||A - Z||^2``.

    ``gram`` may carry a precomputed ``X^T X``.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    G = X.T @ X if gram is None else gram
    K = G + lam * np.eye(G.shape[0])
    return spd_solve(K, G + lam * np.asarray(Z, dtype=np.float64))


def unit_columns(H, eps: float = 1e-12) -> np.ndarray:
    """Columns scaled to unit length; columns shorter than ``eps`` become zero."""
    H = np.asarray(H, dtype=np.float64)
    norms = np.linalg.norm(H, axis=0)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms >= eps)
    return H * scale[None, :]


def build_theta(H, C, alpha1: float, lam: float, lam_z: float, normalize: bool = False,
                trace_c: float | None = None) -> np.ndarray:
    """Entrywise soft-threshold levels for the Z step.

    ``theta_ij = alpha1 ||h_i - h_j||^2 / (2 lam Tr(H L_C H^T)) + lam_z / lam``.
    With ``normalize`` the distances are taken between unit-length columns
    while the trace still uses the raw ``H``.
    """
    H = np.asarray(H, dtype=np.float64)
    if trace_c is None:
        trace_c = trace_quad(H, laplacian(C))
    if trace_c <= DEN_EPS:
        raise NumericalError(f"cannot-link term vanished: Tr(H L_C H^T) = {trace_c:.3e}")
    P = unit_columns(H) if normalize else H
    dist2 = cdist(P.T, P.T, "sqeuclidean")
    return alpha1 * dist2 / (2.0 * lam * trace_c) + lam_z / lam


def soft_threshold(A, theta) -> np.ndarray:
    return np.sign(A) * np.maximum(np.abs(A) - theta, 0.0)


def update_Z(A, theta) -> np.ndarray:
    """Weighted soft-threshold of ``A`` with the diagonal forced to zero."""
    A = np.asarray(A, dtype=np.float64)
    Z = soft_threshold(A, theta)
    np.fill_diagonal(Z, 0.0)
    return Z


def selfrep_objective(X, A, Z, lam: float, lam_z: float) -> float:
    R = X - X @ A
    return float(0.5 * np.sum(R * R) + 0.5 * lam * np.sum((A - Z) ** 2) + lam_z * np.abs(Z).sum())


def selfrep_solve(X, lam: float = 100.0, lam_z: float = 0.5, iters: int = 30, tol: float = 1e-8):
    """Alternate the A and Z steps with the constant threshold ``lam_z / lam``.

    Returns ``(A, Z, objectives)``; ``objectives[0]`` is the value at A = Z = 0.
    Stops early once the relative objective change drops below ``tol``.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[1]
    G = X.T @ X
    A = np.zeros((n, n))
    Z = np.zeros((n, n))
    objectives = [selfrep_objective(X, A, Z, lam, lam_z)]
    theta = lam_z / lam
    for _ in range(iters):
        A = update_A(X, Z, lam, gram=G)
        Z = update_Z(A, theta)
        objectives.append(selfrep_objective(X, A, Z, lam, lam_z))
        prev, cur = objectives[-2], objectives[-1]
        if abs(prev - cur) <= tol * max(abs(prev), 1e-300):
            break
    return A, Z, objectives


def selfrep_affinity(X, lam: float = 100.0, lam_z: float = 0.5, iters: int = 30,
                     tol: float = 1e-8) -> np.ndarray:
    """Nonnegative affinity ``|z_i| / ||z_i||_inf`` from the self-representation solve."""
    _, Z, _ = selfrep_solve(X, lam, lam_z, iters, tol)
    return column_max_scale(Z)
