import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckdbench.errors import DimensionMismatch, NotPositiveDefinite, TooFewSamples
from ckdbench.numkernel import (
    back_substitute,
    cholesky,
    forward_substitute,
    log_det_spd,
    mean_and_covariance,
    solve_spd,
)


def gauss_solve(A, b):
    """Naive Gaussian elimination with partial pivoting, plain Python lists."""
    n = len(b)
    M = [list(map(float, A[i])) + [float(b[i])] for i in range(n)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        M[c], M[p] = M[p], M[c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n + 1):
                M[r][k] -= f * M[c][k]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (M[r][n] - sum(M[r][k] * x[k] for k in range(r + 1, n))) / M[r][r]
    return x


def cofactor_det(A):
    """Permutation-sum determinant; fine for n <= 6."""
    n = len(A)
    total = 0.0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total += (-1) ** inversions * math.prod(A[i][perm[i]] for i in range(n))
    return total


def seeded_spd(n, seed):
    M = np.random.default_rng(seed).normal(size=(n, n))
    return M.T @ M + np.eye(n)


class TestSolve:
    def test_identity(self):
        assert np.allclose(solve_spd(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_diagonal(self):
        assert np.allclose(solve_spd([[4.0, 0.0], [0.0, 9.0]], [8.0, 27.0]), [2.0, 3.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_gauss_elimination(self, seed):
        A = seeded_spd(6, seed)
        b = np.random.default_rng(100 + seed).normal(size=6)
        x = solve_spd(A, b)
        assert np.max(np.abs(x - np.array(gauss_solve(A.tolist(), b.tolist())))) < 1e-8
        assert np.max(np.abs(A @ x - b)) < 1e-8 * (1 + np.max(np.abs(b)))

    def test_ridge(self):
        A = np.array([[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(NotPositiveDefinite):
            solve_spd(A, [1.0, 1.0])
        assert np.allclose(solve_spd(A, [2.0, 1.0], ridge=1.0), [1.0, 1.0])

    def test_matrix_rhs(self):
        A = seeded_spd(4, 9)
        B = np.random.default_rng(1).normal(size=(4, 3))
        assert np.allclose(A @ solve_spd(A, B), B, atol=1e-10)

    def test_errors(self):
        with pytest.raises(NotPositiveDefinite):
            solve_spd([[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            solve_spd(np.eye(3), [1.0, 2.0])
        with pytest.raises(DimensionMismatch):
            cholesky(np.ones((2, 3)))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 7))
    def test_recovers_x0(self, seed, n):
        A = seeded_spd(n, seed)
        x0 = np.random.default_rng(seed + 1).normal(size=n)
        assert np.max(np.abs(solve_spd(A, A @ x0) - x0)) < 1e-8


class TestCholesky:
    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 8))
    def test_round_trip(self, seed, n):
        rng = np.random.default_rng(seed)
        L = np.tril(rng.normal(size=(n, n)), -1) + np.diag(rng.uniform(0.5, 2.0, size=n))
        assert np.max(np.abs(cholesky(L @ L.T) - L)) < 1e-10

    def test_triangular_solves(self):
        L = np.array([[2.0, 0.0], [1.0, 3.0]])
        y = forward_substitute(L, np.array([4.0, 11.0]))
        assert np.allclose(y, [2.0, 3.0])
        assert np.allclose(back_substitute(L.T, np.array([7.0, 9.0])), [2.0, 3.0])


class TestLogDet:
    def test_identity(self):
        assert log_det_spd(np.eye(3)) == 0.0

    def test_diagonal(self):
        assert log_det_spd(np.diag([2.0, 8.0])) == pytest.approx(math.log(16), abs=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_cofactor_oracle(self, seed):
        A = seeded_spd(5, seed)
        expected = math.log(cofactor_det(A.tolist()))
        assert abs(log_det_spd(A) - expected) <= 1e-8 * abs(expected)


class TestCovariance:
    def test_two_points(self):
        mean, cov = mean_and_covariance([[0.0, 0.0], [2.0, 0.0]])
        assert np.array_equal(mean, [1.0, 0.0])
        assert np.array_equal(cov, [[2.0, 0.0], [0.0, 0.0]])

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            mean_and_covariance([[1.0, 2.0]])

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_duplicated_rows(self, k):
        # scatter scales by k while the divisor goes from n-1 to kn-1
        X = np.random.default_rng(k).normal(size=(7, 3))
        n = len(X)
        mean1, cov1 = mean_and_covariance(X)
        meank, covk = mean_and_covariance(np.repeat(X, k, axis=0))
        assert np.allclose(mean1, meank, atol=1e-12)
        assert np.allclose(covk, cov1 * k * (n - 1) / (k * n - 1), atol=1e-12)
        # brute-force recomputation
        D = np.repeat(X, k, axis=0)
        brute = sum(np.outer(r - meank, r - meank) for r in D) / (len(D) - 1)
        assert np.allclose(covk, brute, atol=1e-12)

    def test_symmetric_psd(self):
        X = np.random.default_rng(4).normal(size=(30, 5))
        _, cov = mean_and_covariance(X)
        assert np.array_equal(cov, cov.T)
        assert np.min(np.linalg.eigvalsh(cov)) > -1e-12

    def test_whitening(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(200, 4)) @ rng.normal(size=(4, 4))
        mean, cov = mean_and_covariance(X)
        L = cholesky(cov)
        W = forward_substitute(L, (X - mean).T).T
        _, wcov = mean_and_covariance(W)
        assert np.max(np.abs(wcov - np.eye(4))) < 1e-8
