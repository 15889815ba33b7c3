"""Gaussian linear and quadratic discriminant analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData, DimensionMismatch, NotPositiveDefinite
from ..numkernel import cholesky, forward_substitute, mean_and_covariance
from ..preprocess import NEGATIVE, POSITIVE

CLASSES = (POSITIVE, NEGATIVE)
RIDGE_SCALE = 1e-6
MAX_ESCALATIONS = 30


def regularized_cholesky(cov):
    """Cholesky of cov + ridge*I with ridge = 1e-6 * trace/d, raised 10x until it factors.

    Returns ``(L, ridge)``.
    """
    d = cov.shape[0]
    ridge = RIDGE_SCALE * np.trace(cov) / d
    if not ridge > 0:
        ridge = RIDGE_SCALE
    for _ in range(MAX_ESCALATIONS):
        try:
            return cholesky(cov, ridge), ridge
        except NotPositiveDefinite:
            ridge *= 10.0
    raise NotPositiveDefinite(f"covariance not factorizable with ridge up to {ridge:.3e}")


@dataclass
class DiscriminantModel:
    kind: str                 # "linear" or "quadratic"
    means: np.ndarray         # (2, d), rows in CLASSES order
    covariances: np.ndarray   # (2, d, d), regularized; identical rows when pooled
    log_priors: np.ndarray    # (2,)
    ridges: np.ndarray        # (2,)

    family = "discriminant"

    def __post_init__(self):
        self._factors = [cholesky(c) for c in self.covariances]
        self._log_dets = np.array([2.0 * np.sum(np.log(np.diag(L))) for L in self._factors])

    @property
    def n_features(self):
        return self.means.shape[1]

    def scores(self, X):
        """Per-class Gaussian log-density plus log prior, shape (n, 2)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        out = np.empty((X.shape[0], 2))
        for c in range(2):
            z = forward_substitute(self._factors[c], (X - self.means[c]).T)
            maha = np.sum(z * z, axis=0)
            out[:, c] = -0.5 * self._log_dets[c] - 0.5 * maha + self.log_priors[c]
        return out

    def predict(self, X):
        s = self.scores(X)
        # ties go to the positive class
        return np.where(s[:, 0] >= s[:, 1], CLASSES[0], CLASSES[1]).astype(np.int64)

    def to_dict(self):
        return {
            "kind": self.kind,
            "means": self.means.tolist(),
            "covariances": self.covariances.tolist(),
            "log_priors": self.log_priors.tolist(),
            "ridges": self.ridges.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], np.array(d["means"]), np.array(d["covariances"]),
                   np.array(d["log_priors"]), np.array(d["ridges"]))


def discriminant_score(model: DiscriminantModel, x):
    """Scores of one sample for (positive, negative)."""
    return model.scores(np.asarray(x, dtype=np.float64).reshape(1, -1))[0]


def fit_discriminant(X, y, kind="linear", pooled=None):
    """Estimate class means, covariances and priors.

    ``kind="linear"`` shares the pooled within-class covariance.
    ``kind="quadratic"`` uses one covariance per class unless ``pooled`` is
    True, in which case it reduces to the linear model.
    """
    if kind not in ("linear", "quadratic"):
        raise ValueError(f"unknown discriminant kind {kind!r}")
    if pooled is None:
        pooled = kind == "linear"
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, d = X.shape
    groups = [X[y == c] for c in CLASSES]
    if any(len(g) == 0 for g in groups):
        raise DegenerateData("discriminant analysis needs both classes")
    if any(len(g) < 2 for g in groups):
        raise DegenerateData("each class needs at least two samples for a covariance")
    stats = [mean_and_covariance(g) for g in groups]
    means = np.array([m for m, _ in stats])
    if pooled:
        if n <= 2:
            raise DegenerateData("pooled covariance needs more than two samples")
        within = sum((len(g) - 1) * cov for g, (_, cov) in zip(groups, stats)) / (n - 2)
        raw = [within, within]
    else:
        raw = [cov for _, cov in stats]
    covs, ridges = [], []
    for cov in raw:
        _, ridge = regularized_cholesky(cov)
        covs.append(cov + ridge * np.eye(d))
        ridges.append(ridge)
    priors = np.array([len(g) / n for g in groups])
    return DiscriminantModel(kind, means, np.array(covs), np.log(priors), np.array(ridges))
