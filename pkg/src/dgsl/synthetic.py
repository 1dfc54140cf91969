"""Synthetic Gaussian-blob data with known labels."""
from __future__ import annotations

import numpy as np


def make_blobs(n: int = 150, k: int = 3, d: int = 2, separation: float = 8.0, std: float = 1.0,
               offset: float = 10.0, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``k`` isotropic blobs with pairwise center distance ``separation * std``.

    Centers sit on a regular simplex shifted ``offset * std`` away from the origin
    along the all-ones direction. Returns ``(X, labels)`` with ``X`` d x n.
    """
    if d < k - 1:
        raise ValueError(f"d={d} too small for {k} equidistant centers")
    rng = np.random.default_rng(seed)
    # regular simplex: centered standard basis vectors of R^k, edge length sqrt(2)
    simplex = np.eye(k) - 1.0 / k
    basis, _ = np.linalg.qr(simplex.T)
    coords = simplex @ basis[:, : k - 1]
    centers = np.zeros((k, d))
    centers[:, : k - 1] = coords * (separation * std / np.sqrt(2.0))
    centers += offset * std / np.sqrt(d)
    labels = np.repeat(np.arange(k), n // k)
    labels = np.concatenate([labels, np.arange(n - labels.size)])
    X = centers[labels] + std * rng.standard_normal((n, d))
    return X.T.copy(), labels
