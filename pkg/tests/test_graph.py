import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dgsl.errors import DataError, NumericalError
from dgsl.graph import (
    column_max_scale,
    fuse_affinity,
    knn_affinity,
    laplacian,
    normalized_laplacian,
)

from conftest import prop1_sum


def test_knn_line_example():
    X = np.array([[0.0, 1.0, 3.0]])
    W = knn_affinity(X, m=2, l=1)
    assert W[0, 1] == np.exp(-1.0)
    assert W[0, 2] == pytest.approx(np.exp(-9.0), rel=1e-14)
    # x_2's neighbours are at distance 2 and 3; sigma_2 = 2
    assert W[2, 1] == np.exp(-1.0)
    assert W[2, 0] == pytest.approx(np.exp(-9.0 / 4.0))
    assert np.all(np.diag(W) == 0)


def test_knn_lth_neighbour_is_exactly_inv_e(rng):
    X = rng.standard_normal((3, 40))
    W = knn_affinity(X, m=7, l=5)
    assert np.all(np.count_nonzero(W, axis=1) == 7)
    assert np.all((W >= 0) & (W <= 1))
    nz = W[W > 0]
    assert nz.min() > 0
    # each row has exactly its 5th neighbour at exp(-1) and closer ones above
    for row in W:
        vals = np.sort(row[row > 0])[::-1]
        assert vals[4] == np.exp(-1.0)


def test_knn_duplicates_fallback():
    W = knn_affinity(np.zeros((2, 5)), m=3, l=2)
    assert np.all(np.count_nonzero(W, axis=1) == 3)
    assert set(np.unique(W)) == {0.0, 1.0}


def test_knn_partial_duplicates_uses_smallest_positive():
    X = np.array([[0.0, 0.0, 0.0, 2.0, 5.0]])
    W = knn_affinity(X, m=3, l=2)
    # row 0: neighbours 1 (d=0), 2 (d=0), 3 (d=2); sigma fallback -> 2
    assert W[0, 3] == np.exp(-1.0)
    assert W[0, 1] == 1.0 and W[0, 2] == 1.0


def test_knn_tie_break_smaller_index():
    X = np.array([[0.0, -1.0, 1.0, 5.0]])
    W = knn_affinity(X, m=1, l=1)
    assert W[0, 1] > 0 and W[0, 2] == 0


def test_knn_errors():
    with pytest.raises(DataError):
        knn_affinity(np.zeros((2, 3)), m=3, l=1)
    with pytest.raises(DataError):
        knn_affinity(np.zeros((2, 10)), m=3, l=4)


def test_laplacian_small_cases():
    assert np.array_equal(laplacian([[0, 1], [1, 0]]), [[1, -1], [-1, 1]])
    assert np.array_equal(laplacian(np.zeros((3, 3))), np.zeros((3, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_proposition1_identity(n, k, seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n))
    H = rng.standard_normal((k, n))
    L = laplacian(S)
    value = float(np.trace(H @ L @ H.T))
    assert abs(value - prop1_sum(S, H)) < 1e-10 * (1 + abs(value))
    assert np.allclose(L, L.T)
    assert np.all(np.abs(L.sum(axis=1)) < 1e-10)
    assert np.linalg.eigvalsh(L).min() > -1e-10


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-10, 10)))
def test_laplacian_depends_on_symmetrized_abs(S):
    sym = 0.5 * (np.abs(S) + np.abs(S).T)
    assert np.allclose(laplacian(S), laplacian(sym))


def test_normalized_laplacian_cases():
    assert np.allclose(normalized_laplacian([[0, 1], [1, 0]]), [[1, -1], [-1, 1]])
    K3 = np.ones((3, 3)) - np.eye(3)
    assert np.allclose(np.linalg.eigvalsh(normalized_laplacian(K3)), [0, 1.5, 1.5])


def test_normalized_laplacian_spectrum_bounds(rng):
    S = rng.random((20, 20))
    ev = np.linalg.eigvalsh(normalized_laplacian(S))
    assert ev.min() > -1e-10 and ev.max() < 2 + 1e-10


def test_normalized_laplacian_isolated_vertex():
    S = np.zeros((3, 3))
    S[0, 1] = S[1, 0] = 1
    with pytest.raises(NumericalError, match="vertex 2"):
        normalized_laplacian(S)


def test_fuse_zero_z_normalized(rng):
    W = rng.random((4, 4))
    M = (rng.random((4, 4)) > 0.5).astype(float)
    out = fuse_affinity(np.zeros((4, 4)), W, M, 3.0, 0.7, 10.0, normalize=True)
    assert np.allclose(out, 0.7 * (W + 10.0 * M))


def test_fuse_column_scaling():
    Z = np.zeros((3, 3))
    Z[:, 0] = [0.0, 0.2, -0.4]
    out = fuse_affinity(Z, np.zeros((3, 3)), np.zeros((3, 3)), 1.0, 0.0, 1.0, normalize=True)
    assert np.allclose(out[:, 0], [0.0, 0.5, 1.0])
    assert np.all(out[:, 1:] == 0)


def test_fuse_plain_matches_formula(rng):
    Z, W, M = rng.standard_normal((3, 6, 6))
    out = fuse_affinity(Z, W, M, 0.3, 1.7, 4.0)
    for i in range(6):
        for j in range(6):
            assert out[i, j] == pytest.approx(0.3 * abs(Z[i, j]) + 1.7 * (W[i, j] + 4.0 * M[i, j]))


def test_fuse_shape_mismatch():
    with pytest.raises(ValueError):
        fuse_affinity(np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((2, 2)), 1, 1, 1)


def test_column_max_scale_zero_column():
    Z = np.array([[0.0, 2.0], [0.0, -4.0]])
    assert np.array_equal(column_max_scale(Z), [[0.0, 0.5], [0.0, 1.0]])
