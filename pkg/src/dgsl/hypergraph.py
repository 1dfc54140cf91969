"""Hypergraph incidence, normalized adjacency O and Laplacian I - O."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, NumericalError


@dataclass(frozen=True)
class Hypergraph:
    n_vertices: int
    hyperedges: tuple[frozenset[int], ...]
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self):
        edges = tuple(frozenset(int(v) for v in e) for e in self.hyperedges)
        weights = tuple(float(w) for w in self.weights) or (1.0,) * len(edges)
        if len(weights) != len(edges):
            raise DataError(f"{len(weights)} weights for {len(edges)} hyperedges")
        for idx, e in enumerate(edges):
            if not e:
                raise DataError(f"hyperedge {idx} is empty")
            bad = [v for v in e if not 0 <= v < self.n_vertices]
            if bad:
                raise DataError(f"hyperedge {idx} has vertex {bad[0]} outside [0, {self.n_vertices})")
        if any(w <= 0 for w in weights):
            raise DataError("hyperedge weights must be positive")
        object.__setattr__(self, "hyperedges", edges)
        object.__setattr__(self, "weights", weights)


def incidence(hg: Hypergraph) -> np.ndarray:
    U = np.zeros((hg.n_vertices, len(hg.hyperedges)))
    for e, members in enumerate(hg.hyperedges):
        U[sorted(members), e] = 1.0
    return U


def hypergraph_O(hg: Hypergraph) -> np.ndarray:
    """``Dv^{-1/2} U We De^{-1} U^T Dv^{-1/2}``."""
    U = incidence(hg)
    w = np.asarray(hg.weights)
    dv = U @ w
    isolated = np.flatnonzero(dv <= 0)
    if isolated.size:
        raise NumericalError(f"vertex {int(isolated[0])} belongs to no hyperedge")
    de = U.sum(axis=0)
    s = 1.0 / np.sqrt(dv)
    Us = U * s[:, None]
    O = (Us * (w / de)[None, :]) @ Us.T
    return 0.5 * (O + O.T)


def hypergraph_laplacian(hg: Hypergraph) -> np.ndarray:
    return np.eye(hg.n_vertices) - hypergraph_O(hg)


def hybrid_affinity(W, O, gamma2: float = 1.0) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    O = np.asarray(O, dtype=np.float64)
    if W.shape != O.shape:
        raise ValueError(f"shape mismatch: W {W.shape}, O {O.shape}")
    if gamma2 < 0:
        raise ValueError(f"gamma2 must be nonnegative, got {gamma2}")
    return W + gamma2 * O


def read_hyperedges(path, n_vertices: int | None = None) -> Hypergraph:
    """One hyperedge per line: vertex indices, optionally ending in ``w=<weight>``."""
    edges, weights = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        weight = 1.0
        if parts[-1].startswith("w="):
            try:
                weight = float(parts.pop()[2:])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad weight in {raw!r}") from None
        try:
            edges.append([int(p) for p in parts])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer vertex in {raw!r}") from None
        weights.append(weight)
    if n_vertices is None:
        n_vertices = 1 + max((max(e) for e in edges if e), default=-1)
    return Hypergraph(n_vertices, tuple(edges), tuple(weights))
