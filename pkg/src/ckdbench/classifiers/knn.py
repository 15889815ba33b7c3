"""k-nearest-neighbour voting with euclidean, cosine and cubic Minkowski distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData, DimensionMismatch, KTooLarge
from ..preprocess import NEGATIVE, POSITIVE

METRICS = ("euclidean", "cosine", "minkowski3")
WEIGHTINGS = ("uniform", "squared_inverse")
MIN_SQ_DIST = 1e-12


def distances(A, B, metric):
    """Pairwise distances, shape (len(A), len(B))."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if metric == "euclidean":
        diff = A[:, None, :] - B[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2))
    if metric == "minkowski3":
        diff = np.abs(A[:, None, :] - B[None, :, :])
        return np.sum(diff ** 3, axis=2) ** (1.0 / 3.0)
    if metric == "cosine":
        na = np.linalg.norm(A, axis=1)
        nb = np.linalg.norm(B, axis=1)
        denom = na[:, None] * nb[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            d = 1.0 - (A @ B.T) / denom
        return np.where(denom > 0, d, 1.0)
    raise ValueError(f"unknown metric {metric!r}")


def vote(dists, labels, weighting="uniform"):
    """Decide one query from its k nearest neighbours, given nearest first.

    Equal weighted votes go to the label of the nearest neighbour; when
    several neighbours share the smallest distance and disagree, to the
    positive class.
    """
    pos = neg = 0.0
    for d, lab in zip(dists, labels):
        w = 1.0 if weighting == "uniform" else 1.0 / max(d * d, MIN_SQ_DIST)
        if lab == POSITIVE:
            pos += w
        else:
            neg += w
    if pos > neg:
        return POSITIVE
    if neg > pos:
        return NEGATIVE
    nearest = {lab for d, lab in zip(dists, labels) if d == dists[0]}
    return nearest.pop() if len(nearest) == 1 else POSITIVE


@dataclass
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int
    metric: str = "euclidean"
    weighting: str = "uniform"

    family = "knn"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.k > self.X.shape[0]:
            raise KTooLarge(f"k={self.k} exceeds the {self.X.shape[0]} stored samples")

    @property
    def n_features(self):
        return self.X.shape[1]

    def neighbours(self, X):
        """Indices and distances of the k nearest stored samples, nearest first."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        D = distances(X, self.X, self.metric)
        # stable sort: equal distances keep training order
        idx = np.argsort(D, axis=1, kind="stable")[:, : self.k]
        return idx, np.take_along_axis(D, idx, axis=1)

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        X = np.atleast_2d(X)
        idx, dist = self.neighbours(X)
        return np.array(
            [vote(list(dist[q]), list(self.y[idx[q]]), self.weighting) for q in range(X.shape[0])],
            dtype=np.int64,
        )

    def to_dict(self):
        return {"X": self.X.tolist(), "y": self.y.tolist(), "k": self.k,
                "metric": self.metric, "weighting": self.weighting}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["X"], dtype=np.float64).reshape(len(d["y"]), -1),
                   np.array(d["y"], dtype=np.int64), d["k"], d["metric"], d["weighting"])


def knn_vote(model: KnnModel, x):
    return int(model.predict(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def fit_knn(X, y, k, metric="euclidean", weighting="uniform"):
    X = np.array(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise DegenerateData("no training samples")
    return KnnModel(X, np.array(y, dtype=np.int64), k, metric, weighting)
