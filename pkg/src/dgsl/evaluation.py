"""Post-processing and scoring: column normalization, K-means, ACC, NMI."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .selfrep import unit_columns


def normalize_columns(H) -> np.ndarray:
    return unit_columns(H)


@dataclass
class EvalReport:
    acc: float
    nmi: float
    seed: int
    meta: dict = field(default_factory=dict)


def _kmeans_pp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = [points[rng.integers(n)]]
    d2 = cdist(points, centers, "sqeuclidean").ravel()
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(points[idx])
        d2 = np.minimum(d2, cdist(points, points[idx : idx + 1], "sqeuclidean").ravel())
    return np.array(centers)


def lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int = 300):
    """Lloyd iterations from ``centers`` (rows). Returns ``(labels, centers, sse_history)``.

    An emptied cluster is re-seeded at the point farthest from its center.
    """
    centers = centers.copy()
    k = len(centers)
    history = []
    labels = None
    for _ in range(max_iter):
        d2 = cdist(points, centers, "sqeuclidean")
        new_labels = d2.argmin(axis=1)
        per_point = d2[np.arange(len(points)), new_labels]
        history.append(float(per_point.sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            mask = labels == c
            if mask.any():
                centers[c] = points[mask].mean(axis=0)
            else:
                far = int(per_point.argmax())
                centers[c] = points[far]
                per_point[far] = 0.0
    return labels, centers, history


def kmeans(P, k: int, restarts: int = 10, seed: int = 0, max_iter: int = 300) -> np.ndarray:
    """K-means on the columns of ``P`` (k-means++ seeding, best of ``restarts`` by SSE)."""
    points = np.asarray(P, dtype=np.float64).T
    n = len(points)
    if n < k:
        raise ValueError(f"cannot form {k} clusters from {n} points")
    rng = np.random.default_rng(seed)
    best_sse, best = np.inf, None
    for _ in range(restarts):
        labels, _, hist = lloyd(points, _kmeans_pp(points, k, rng), max_iter)
        if hist[-1] < best_sse:
            best_sse, best = hist[-1], labels
    return best.astype(np.int64)


def _check_pair(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"label lengths differ: {pred.size} vs {truth.size}")
    return pred, truth


def contingency(pred, truth) -> np.ndarray:
    pred, truth = _check_pair(pred, truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1 if p.size else 0, t.max() + 1 if t.size else 0), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def accuracy(pred, truth) -> float:
    """Fraction correct under the best one-to-one cluster-to-class matching."""
    table = contingency(pred, truth)
    if table.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / table.sum())


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Mutual information over the geometric mean of the two entropies (0 when undefined)."""
    table = contingency(pred, truth).astype(np.float64)
    total = table.sum()
    if total == 0:
        return 0.0
    h_pred = _entropy(table.sum(axis=1))
    h_true = _entropy(table.sum(axis=0))
    if h_pred <= 0.0 or h_true <= 0.0:
        return 0.0
    pij = table / total
    outer = np.outer(pij.sum(axis=1), pij.sum(axis=0))
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    return float(np.clip(mi / np.sqrt(h_pred * h_true), 0.0, 1.0))


def evaluate_embedding(H, truth, k: int, seed: int = 0, restarts: int = 10) -> EvalReport:
    pred = kmeans(normalize_columns(H), k, restarts=restarts, seed=seed)
    return EvalReport(acc=accuracy(pred, truth), nmi=nmi(pred, truth), seed=seed)
