"""Dense linear algebra for the discriminant, SVM and Levenberg-Marquardt code.

Only symmetric positive-definite systems are needed, so everything goes
through a Cholesky factorization. Matrices are float64 numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, TooFewSamples


def _as_square(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def cholesky(A, ridge=0.0):
    """Lower-triangular L with L @ L.T == A + ridge * I.

    Raises NotPositiveDefinite when a pivot is not strictly positive.
    """
    A = _as_square(A)
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        row = L[j, :j]
        pivot = A[j, j] + ridge - row @ row
        if not pivot > 0.0:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j}")
        d = math.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ row) / d
    return L


def forward_substitute(L, b):
    """Solve L y = b for lower-triangular L; b may be a vector or a matrix."""
    y = np.zeros(np.shape(b))
    for i in range(L.shape[0]):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def back_substitute(U, y):
    """Solve U x = y for upper-triangular U."""
    n = U.shape[0]
    x = np.zeros(np.shape(y))
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def cho_solve(L, b):
    b = np.asarray(b, dtype=np.float64)
    return back_substitute(L.T, forward_substitute(L, b))


def solve_spd(A, b, ridge=0.0):
    """Solve (A + ridge*I) x = b."""
    A = _as_square(A)
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, matrix has {A.shape[0]}")
    return cho_solve(cholesky(A, ridge), b)


def log_det_spd(A, ridge=0.0):
    L = cholesky(A, ridge)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def mean_and_covariance(X):
    """Sample mean and unbiased (n - 1) covariance of the rows of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D array")
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    mean = X.mean(axis=0)
    centred = X - mean
    cov = centred.T @ centred / (n - 1)
    # exact symmetry; the product is symmetric only up to round-off
    cov = 0.5 * (cov + cov.T)
    return mean, cov
