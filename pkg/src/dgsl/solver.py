"""Alternating minimization drivers for dynamic graph structure learning."""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .constraints import ConstraintSet, encode_constraints
from .errors import ConfigError, NumericalError
from .graph import knn_affinity, laplacian, normalized_laplacian, trace_quad
from .selfrep import DEN_EPS, build_theta, update_A, update_Z
from .traceratio import solve_H, trace_ratio_solve

log = logging.getLogger(__name__)

ORTHO_TOL = 1e-8


@dataclass
class SolverConfig:
    """Hyperparameters. ``alpha1`` is derived from ``tau``; ``alpha2 = alpha2_ratio * alpha1``."""

    k: int = 2
    lam: float = 100.0
    lam_z: float = 0.5
    lam_m: float = 10.0
    tau: float = 0.1
    alpha2_ratio: float = 0.2
    m: int = 7
    l: int = 5
    eta: int = 20
    T: int = 50
    tol_inner: float = 1e-8
    tol_outer: float = 1e-6
    normalize: bool = True
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.lam > 0, "lam must be > 0"),
            (self.lam_z >= 0, "lam_z must be >= 0"),
            (self.lam_m > 0, "lam_m must be > 0"),
            (self.tau > 0, "tau must be > 0"),
            (self.alpha2_ratio > 0, "alpha2_ratio must be > 0"),
            (self.T >= 1, "T must be >= 1"),
            (self.eta >= 1, "eta must be >= 1"),
            (self.k >= 2, "k must be >= 2"),
            (1 <= self.l <= self.m, "need 1 <= l <= m"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FitResult:
    A: np.ndarray
    Z: np.ndarray
    H: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    step_norms: list[tuple[float, float]] = field(default_factory=list)
    iterations_run: int = 0
    alpha1: float = 0.0
    alpha2: float = 0.0
    elapsed: float = 0.0


def eval_objective(A, Z, H, X, W, M, C, cfg: SolverConfig, alpha1: float, alpha2: float) -> float:
    """Penalized objective at a feasible point (``diag(Z) = 0``, ``H H^T = I``)."""
    Z = np.asarray(Z, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    if np.any(np.diag(Z) != 0.0):
        raise ValueError("Z must have a zero diagonal")
    k = H.shape[0]
    if np.abs(H @ H.T - np.eye(k)).max() > ORTHO_TOL:
        raise ValueError("H must have orthonormal rows")
    den = trace_quad(H, laplacian(C))
    if den <= DEN_EPS:
        raise NumericalError(f"cannot-link term vanished: Tr(H L_C H^T) = {den:.3e}")
    R = X - X @ A
    smooth = 0.5 * np.sum(R * R) + 0.5 * cfg.lam * np.sum((A - Z) ** 2)
    sparse = cfg.lam_z * np.abs(Z).sum()
    num = alpha1 * trace_quad(H, laplacian(Z)) + alpha2 * trace_quad(
        H, laplacian(W) + cfg.lam_m * laplacian(M)
    )
    return float(smooth + sparse + num / den)


def compute_alpha1(H1, C, tau: float, lam: float) -> float:
    """``alpha1 = 2 tau lam Tr(H1 L_C H1^T)``."""
    if tau <= 0 or lam <= 0:
        raise ConfigError("tau and lam must be positive")
    tr = trace_quad(H1, laplacian(C))
    if tr <= 0:
        raise NumericalError(f"Tr(H1 L_C H1^T) = {tr:.3e} is not positive")
    return 2.0 * tau * lam * tr


def initial_embedding(W, M, C, cfg: SolverConfig):
    """Embedding from the normalized problem with affinity ``W + lam_m M``."""
    zero = np.zeros_like(W)
    return solve_H(zero, W, M, C, 1.0, 1.0, cfg.lam_m, cfg.k, normalize=True,
                   eta=cfg.eta, tol=cfg.tol_inner)


def fit(X, cs: ConstraintSet, cfg: SolverConfig, W=None,
        callback: Optional[Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]] = None
        ) -> FitResult:
    """Run the alternating scheme H -> A -> Z from A = Z = 0.

    ``cfg.normalize`` selects the variant with column-normalized affinities,
    a normalized Laplacian in the H step and unit-length embeddings in the
    threshold; otherwise the plain scheme, whose objective is monotone.
    ``W`` overrides the kNN affinity (e.g. a hypergraph-augmented one).
    ``callback(t, A, Z, H)`` runs after each outer iteration.
    """
    start = time.perf_counter()
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[1]
    if cs.n != n:
        raise ConfigError(f"constraint set covers {cs.n} points but X has {n}")
    if cfg.k >= n:
        raise ConfigError(f"k={cfg.k} must be smaller than n={n}")
    if W is None:
        W = knn_affinity(X, cfg.m, cfg.l)
    M, C = encode_constraints(cs)
    L_C = laplacian(C)

    H1 = initial_embedding(W, M, C, cfg).H
    alpha1 = compute_alpha1(H1, C, cfg.tau, cfg.lam)
    alpha2 = cfg.alpha2_ratio * alpha1
    log.debug("alpha1=%.6g alpha2=%.6g", alpha1, alpha2)

    G = X.T @ X
    A = np.zeros((n, n))
    Z = np.zeros((n, n))
    H = None
    objectives: list[float] = []
    steps: list[tuple[float, float]] = []
    t = 0
    for t in range(1, cfg.T + 1):
        H = solve_H(Z, W, M, C, alpha1, alpha2, cfg.lam_m, cfg.k, normalize=cfg.normalize,
                    eta=cfg.eta, tol=cfg.tol_inner, H0=H, L_C=L_C).H
        A_new = update_A(X, Z, cfg.lam, gram=G)
        theta = build_theta(H, C, alpha1, cfg.lam, cfg.lam_z, normalize=cfg.normalize,
                            trace_c=trace_quad(H, L_C))
        Z_new = update_Z(A_new, theta)
        dA = float(np.linalg.norm(A_new - A))
        dZ = float(np.linalg.norm(Z_new - Z))
        A, Z = A_new, Z_new
        obj = eval_objective(A, Z, H, X, W, M, C, cfg, alpha1, alpha2)
        if not np.isfinite(obj):
            raise NumericalError(f"objective became non-finite at iteration {t}")
        objectives.append(obj)
        steps.append((dA, dZ))
        if callback is not None:
            callback(t, A, Z, H)
        if max(dA, dZ) / max(1.0, float(np.linalg.norm(Z))) < cfg.tol_outer:
            break
    return FitResult(A=A, Z=Z, H=H, objective_trace=objectives, step_norms=steps,
                     iterations_run=t, alpha1=alpha1, alpha2=alpha2,
                     elapsed=time.perf_counter() - start)


def spectral_embedding(W, k: int, eta: int = 20) -> np.ndarray:
    """Unconstrained baseline: bottom-``k`` eigenvectors of the normalized Laplacian of ``W``."""
    n = W.shape[0]
    return trace_ratio_solve(np.eye(n), normalized_laplacian(W), k, eta=eta).H
