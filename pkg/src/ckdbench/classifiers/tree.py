"""Binary CART decision tree on numeric (and one-hot) features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from ..preprocess import NEGATIVE, POSITIVE

# score differences smaller than this count as ties
TIE_TOL = 1e-12


def gini(pos, total):
    p = pos / total
    return 2.0 * p * (1.0 - p)


def entropy(pos, total):
    p = np.asarray(pos / total, dtype=np.float64)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(q > 0, q * np.log2(q), 0.0))
    return h


IMPURITY = {"gini": gini, "info_gain": entropy, "entropy": entropy}


def split_score(values, labels, criterion="gini", min_leaf=1):
    """Best midpoint threshold on one column and its impurity decrease.

    ``labels`` are 0/1. Candidate thresholds are midpoints between
    consecutive distinct sorted values that leave at least ``min_leaf``
    samples on each side. Returns ``(threshold, score)``; ``threshold`` is
    None when no candidate exists, in which case the score is 0. Equal
    scores resolve to the lowest threshold.
    """
    impurity = IMPURITY[criterion]
    v = np.asarray(values, dtype=np.float64)
    y = np.asarray(labels)
    n = v.shape[0]
    if n < 2:
        return None, 0.0
    order = np.argsort(v, kind="stable")
    v, y = v[order], y[order]
    cut = np.flatnonzero(v[:-1] < v[1:])
    n_left = cut + 1
    ok = (n_left >= min_leaf) & (n - n_left >= min_leaf)
    cut, n_left = cut[ok], n_left[ok]
    if cut.size == 0:
        return None, 0.0
    cum_pos = np.cumsum(y == POSITIVE)
    total_pos = cum_pos[-1]
    pos_left = cum_pos[cut]
    pos_right = total_pos - pos_left
    n_right = n - n_left
    parent = impurity(total_pos, n)
    scores = parent - (n_left / n) * impurity(pos_left, n_left) - (n_right / n) * impurity(pos_right, n_right)
    best = scores.max()
    k = int(np.flatnonzero(scores >= best - TIE_TOL)[0])
    threshold = 0.5 * (v[cut[k]] + v[cut[k] + 1])
    return float(threshold), float(scores[k])


@dataclass
class TreeModel:
    """Array-backed binary tree. Node 0 is the root; ``feature == -1`` marks a leaf.

    Samples with ``x[feature] <= threshold`` go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, 2): negatives, positives
    n_features: int
    criterion: str = "gini"

    family = "tree"

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    def leaf_label(self, node):
        neg, pos = self.counts[node]
        return POSITIVE if pos >= neg else NEGATIVE

    def apply(self, X):
        """Leaf index reached by every row of X."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got shape {X.shape}")
        out = np.empty(X.shape[0], dtype=np.int64)
        for i, x in enumerate(X):
            node = 0
            while self.feature[node] >= 0:
                if x[self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[i] = node
        return out

    def predict(self, X):
        leaves = self.apply(X)
        return np.array([self.leaf_label(n) for n in leaves], dtype=np.int64)

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
            "n_features": self.n_features,
            "criterion": self.criterion,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["counts"], dtype=np.int64).reshape(-1, 2),
            d["n_features"],
            d.get("criterion", "gini"),
        )


def fit_tree(X, y, criterion="gini", min_leaf=1, max_depth=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        pos = int(np.sum(y[idx] == POSITIVE))
        counts.append((len(idx) - pos, pos))
        return node

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        neg, pos = counts[node]
        if neg == 0 or pos == 0 or len(idx) < 2 * min_leaf:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        best_feat, best_thr, best_score = -1, None, -np.inf
        for f in range(X.shape[1]):
            thr, score = split_score(X[idx, f], y[idx], criterion, min_leaf)
            if thr is not None and score > best_score + TIE_TOL:
                best_feat, best_thr, best_score = f, thr, score
        if best_feat < 0:
            continue
        go_left = X[idx, best_feat] <= best_thr
        li, ri = idx[go_left], idx[~go_left]
        feature[node] = best_feat
        threshold[node] = best_thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return TreeModel(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(-1, 2),
        X.shape[1],
        criterion,
    )
