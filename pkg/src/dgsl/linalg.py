"""Dense symmetric eigensolver and SPD solve used by the optimizers.

Matrices are plain 2-D ``float64`` numpy arrays; points are stored as columns.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NumericalError


class EigPair(NamedTuple):
    value: float
    vector: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 array or raise ``ValueError``."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def _check_square(m: np.ndarray, name: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def top_eigh(M, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Largest ``k`` eigenpairs of the symmetric part of ``M``.

    Returns ``(values, V)`` with values in descending order and the
    eigenvectors as the columns of ``V``. Each vector's largest-magnitude
    entry is made positive so repeated calls give identical output.
    """
    M = np.asarray(M, dtype=np.float64)
    _check_square(M, "M")
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    sym = 0.5 * (M + M.T)
    vals, vecs = scipy.linalg.eigh(sym, subset_by_index=[n - k, n - 1])
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(k)])
    signs[signs == 0] = 1.0
    return vals, vecs * signs


def sym_eig_topk(M, k: int) -> list[EigPair]:
    vals, vecs = top_eigh(M, k)
    return [EigPair(float(v), vecs[:, i]) for i, v in enumerate(vals)]


def spd_solve(K, B) -> np.ndarray:
    """Solve ``K @ A = B`` for symmetric positive-definite ``K`` via Cholesky."""
    K = np.asarray(K, dtype=np.float64)
    _check_square(K, "K")
    B = np.asarray(B, dtype=np.float64)
    if B.shape[0] != K.shape[0]:
        raise ValueError(f"shape mismatch: K is {K.shape}, B is {B.shape}")
    try:
        factor = scipy.linalg.cho_factor(K, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"matrix is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(factor, B)
