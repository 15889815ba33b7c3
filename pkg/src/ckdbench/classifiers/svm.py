"""Soft-margin SVM trained by sequential minimal optimization.

Working-pair selection follows the second-order rule of Fan, Chen and Lin;
the pair update and clipping are the usual two-variable analytic solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData, DimensionMismatch
from ..preprocess import NEGATIVE, POSITIVE

log = logging.getLogger(__name__)

TAU = 1e-12


def kernel_matrix(A, B, kernel):
    G = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64).T
    if kernel == "linear":
        return G
    if kernel == "poly2":
        return (1.0 + G) ** 2
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass
class SvmModel:
    support_vectors: np.ndarray   # (s, d)
    dual_coef: np.ndarray         # alpha_i * y_i for each support vector
    bias: float
    kernel: str
    C: float
    support_index: np.ndarray     # positions of the support vectors in the training set
    converged: bool = True
    iterations: int = 0

    family = "svm"

    @property
    def n_features(self):
        return self.support_vectors.shape[1]

    @property
    def alphas(self):
        return np.abs(self.dual_coef)

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        if self.support_vectors.shape[0] == 0:
            return np.full(X.shape[0], self.bias)
        return kernel_matrix(X, self.support_vectors, self.kernel) @ self.dual_coef + self.bias

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, POSITIVE, NEGATIVE).astype(np.int64)

    def to_dict(self):
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "kernel": self.kernel,
            "C": self.C,
            "support_index": self.support_index.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        sv = np.array(d["support_vectors"], dtype=np.float64)
        return cls(sv, np.array(d["dual_coef"], dtype=np.float64), d["bias"], d["kernel"], d["C"],
                   np.array(d["support_index"], dtype=np.int64), d["converged"], d["iterations"])


def _select_pair(alpha, G, y, K, C):
    minus_yG = -y * G
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    if not up.any() or not low.any():
        return -1, -1, 0.0
    cand_up = np.where(up, minus_yG, -np.inf)
    i = int(np.argmax(cand_up))
    m = cand_up[i]
    M = np.min(np.where(low, minus_yG, np.inf))
    gap = m - M
    b = m - minus_yG
    eligible = low & (b > 0)
    if not eligible.any():
        return i, -1, gap
    a = K[i, i] + np.diag(K) - 2.0 * K[i]
    a = np.where(a > 0, a, TAU)
    obj = np.where(eligible, -(b * b) / a, np.inf)
    j = int(np.argmin(obj))
    return i, j, gap


def smo_train(X, y, kernel="linear", C=1.0, tol=1e-3, max_passes=None):
    """Solve the soft-margin dual for labels ``y`` in {-1, +1}.

    Stops once the maximal KKT violation gap drops below ``tol`` or after
    ``max_passes`` pair updates (default 200 * n). A model that hits the
    budget is returned with ``converged=False``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if not (np.any(y > 0) and np.any(y < 0)):
        raise DegenerateData("SVM training needs both classes")
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be -1 or +1")
    if C <= 0:
        raise ValueError("C must be positive")
    if max_passes is None:
        max_passes = 200 * n

    K = kernel_matrix(X, X, kernel)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of the dual objective: Q alpha - 1
    converged = False
    it = 0
    while it < max_passes:
        i, j, gap = _select_pair(alpha, G, y, K, C)
        if j < 0 or gap < tol:
            converged = True
            break
        it += 1
        old_i, old_j = alpha[i], alpha[j]
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = TAU
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        G += y * (K[:, i] * (y[i] * (ai - old_i)) + K[:, j] * (y[j] * (aj - old_j)))

    if not converged:
        log.warning("SMO stopped after %d pair updates without meeting tol=%g", it, tol)

    minus_yG = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(np.mean(minus_yG[free]))
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        hi = np.max(minus_yG[up]) if up.any() else np.min(minus_yG[low])
        lo = np.min(minus_yG[low]) if low.any() else hi
        bias = float(0.5 * (hi + lo))

    sv = np.flatnonzero(alpha > 0)
    return SvmModel(X[sv], alpha[sv] * y[sv], bias, kernel, float(C), sv, converged, it)


def dual_objective(alpha, X, y, kernel):
    """Value of sum(alpha) - 1/2 alpha' Q alpha (to be maximized)."""
    K = kernel_matrix(X, X, kernel)
    ay = alpha * y
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


def full_alpha(model: SvmModel, n):
    alpha = np.zeros(n)
    alpha[model.support_index] = model.alphas
    return alpha


def fit_svm(X, labels01, kernel="linear", C=1.0, tol=1e-3, max_passes=None):
    y = np.where(np.asarray(labels01) == POSITIVE, 1.0, -1.0)
    return smo_train(X, y, kernel, C, tol, max_passes)
