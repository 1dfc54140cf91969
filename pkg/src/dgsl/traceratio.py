"""Trace-ratio maximization over row-orthonormal H by eigen-iteration."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .graph import fuse_affinity, laplacian, normalized_laplacian, trace_quad
from .linalg import top_eigh

DEN_EPS = 1e-12
RIDGE = 1e-10


@dataclass
class TraceRatioResult:
    H: np.ndarray
    rho: float
    iterations: int
    rho_trace: list[float] = field(default_factory=list)


def ridge(E: np.ndarray) -> float:
    """Diagonal shift keeping ``H E H^T`` away from zero on singular Laplacians."""
    n = E.shape[0]
    return RIDGE * (1.0 + np.trace(E) / n)


def _ratio(H, B, E) -> float:
    den = trace_quad(H, E)
    if den <= DEN_EPS:
        raise NumericalError(f"degenerate trace-ratio denominator: {den:.3e}")
    return trace_quad(H, B) / den


def trace_ratio_solve(B, E, k: int, eta: int = 20, tol: float = 1e-8, H0=None) -> TraceRatioResult:
    """Maximize ``Tr(H B H^T) / Tr(H E H^T)`` subject to ``H H^T = I``.

    Each step takes ``H`` as the top-``k`` eigenvectors of ``B - rho E`` and
    recomputes ``rho``; stops after ``eta`` steps or when the change in
    ``rho`` falls below ``tol * max(1, |rho|)``. ``E`` receives a small ridge
    first. Without ``H0`` the start is the top-``k`` eigenvectors of ``B``.
    """
    B = np.asarray(B, dtype=np.float64)
    E = np.asarray(E, dtype=np.float64)
    n = B.shape[0]
    if B.shape != (n, n) or E.shape != (n, n):
        raise ValueError(f"B and E must be square and equal-sized, got {B.shape}, {E.shape}")
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    B = 0.5 * (B + B.T)
    E = 0.5 * (E + E.T)
    E = E + ridge(E) * np.eye(n)

    if H0 is None:
        H = top_eigh(B, k)[1].T
    else:
        H = np.asarray(H0, dtype=np.float64)
        if H.shape != (k, n):
            raise ValueError(f"H0 must be {k} x {n}, got {H.shape}")
    rho = _ratio(H, B, E)
    trace = [rho]
    it = 0
    while it < eta:
        it += 1
        V = top_eigh(B - rho * E, k)[1].T
        new_rho = _ratio(V, B, E)
        if new_rho < rho:
            # round-off only; keep the better iterate
            break
        H, step, rho = V, new_rho - rho, new_rho
        trace.append(rho)
        if step < tol * max(1.0, abs(rho)):
            break
    return TraceRatioResult(H=H, rho=rho, iterations=it, rho_trace=trace)


def solve_H(Z, W, M, C, alpha1: float, alpha2: float, lam_m: float, k: int,
            normalize: bool = False, eta: int = 20, tol: float = 1e-8, H0=None,
            L_C=None) -> TraceRatioResult:
    """Embedding step: ``B = L_C`` against the fused-affinity (normalized) Laplacian."""
    Wt = fuse_affinity(Z, W, M, alpha1, alpha2, lam_m, normalize)
    E = normalized_laplacian(Wt) if normalize else laplacian(Wt)
    B = laplacian(C) if L_C is None else L_C
    return trace_ratio_solve(B, E, k, eta=eta, tol=tol, H0=H0)
