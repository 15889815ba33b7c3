"""Independent reference implementations the tests compare against.

They are deliberately naive (plain loops, exhaustive search) and share no
code with the package beyond the kernel function used to build the SVM
dual.
"""

import math

import numpy as np

from ckdbench.classifiers.neural import mse
from ckdbench.classifiers.svm import full_alpha, kernel_matrix


def scan_arff_text(text, n_cols):
    """Independent oracle: count '?' per column and labels by scanning raw lines."""
    missing = [0] * n_cols
    labels = {}
    in_data = False
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        if s.lower() == "@data":
            in_data = True
            continue
        if not in_data:
            continue
        fields = [f.strip() for f in s.split(",")]
        while len(fields) > n_cols and fields[-1] == "":
            fields.pop()
        for j, f in enumerate(fields[:-1]):
            if f == "?":
                missing[j] += 1
        labels[fields[-1]] = labels.get(fields[-1], 0) + 1
    return missing, labels


def entropy_bits(labels):
    n = len(labels)
    if n == 0:
        return 0.0
    p = sum(labels) / n
    return -sum(q * math.log2(q) for q in (p, 1 - p) if q > 0)


def gini_index(labels):
    n = len(labels)
    p = sum(labels) / n if n else 0.0
    return 1 - p * p - (1 - p) ** 2


def brute_split(values, labels, impurity):
    best = (None, 0.0)
    distinct = sorted(set(values))
    parent = impurity(labels)
    for a, b in zip(distinct, distinct[1:]):
        thr = (a + b) / 2
        left = [l for v, l in zip(values, labels) if v <= thr]
        right = [l for v, l in zip(values, labels) if v > thr]
        n = len(labels)
        score = parent - len(left) / n * impurity(left) - len(right) / n * impurity(right)
        if best[0] is None or score > best[1] + 1e-12:
            best = (thr, score)
    return best


def project_box_hyperplane(v, y, C):
    """Euclidean projection onto {0 <= a <= C, y.a = 0}.

    y.a(mu) with a(mu) = clip(v - mu*y, 0, C) is piecewise linear and
    non-increasing in mu, so the root is found between two breakpoints.
    """
    def h(mu):
        return np.clip(v - mu[..., None] * y, 0, C) @ y

    bps = np.unique(np.concatenate([v * y, (v - C) * y]))
    vals = h(bps)
    if np.any(vals == 0):
        mu = bps[np.flatnonzero(vals == 0)[0]]
    else:
        k = np.flatnonzero(vals < 0)[0]
        lo, hi = bps[k - 1], bps[k]
        mu = lo + (hi - lo) * vals[k - 1] / (vals[k - 1] - vals[k])
    return np.clip(v - mu * y, 0, C)


def qp_oracle(X, y, kernel, C, iters=5000):
    """Projected gradient ascent on the dual; returns the objective value."""
    Q = np.outer(y, y) * kernel_matrix(X, X, kernel)
    step = 1.0 / max(np.linalg.eigvalsh(Q).max(), 1e-9)
    a = np.zeros(len(y))
    for _ in range(iters):
        a = project_box_hyperplane(a + step * (1 - Q @ a), y, C)
    return float(a.sum() - 0.5 * a @ Q @ a)


def kkt_ok(model, X, y, tol):
    alpha = full_alpha(model, len(y))
    f = model.decision_function(X)
    m = y * f
    C = model.C
    eps = 1e-9
    if abs(alpha @ y) > 1e-8:
        return False
    for a, mi in zip(alpha, m):
        if a <= eps and mi < 1 - tol:
            return False
        if eps < a < C - eps and abs(mi - 1) > tol:
            return False
        if a >= C - eps and mi > 1 + tol:
            return False
    return True


def naive_knn(Xtr, ytr, x, k, metric, weighting):
    rows = []
    for i, (row, lab) in enumerate(zip(Xtr, ytr)):
        if metric == "euclidean":
            d = math.sqrt(sum((a - b) ** 2 for a, b in zip(row, x)))
        elif metric == "minkowski3":
            d = sum(abs(a - b) ** 3 for a, b in zip(row, x)) ** (1 / 3)
        else:
            na = math.sqrt(sum(a * a for a in row))
            nb = math.sqrt(sum(b * b for b in x))
            d = 1.0 if na == 0 or nb == 0 else 1 - sum(a * b for a, b in zip(row, x)) / (na * nb)
        rows.append((d, i, lab))
    rows.sort()
    near = rows[:k]
    score = {0: 0.0, 1: 0.0}
    for d, _, lab in near:
        score[lab] += 1.0 if weighting == "uniform" else 1.0 / max(d * d, 1e-12)
    if score[1] != score[0]:
        return 1 if score[1] > score[0] else 0
    tied = {lab for d, _, lab in near if d == near[0][0]}
    return tied.pop() if len(tied) == 1 else 1


def central_difference(model, X, t, h=1e-5):
    theta = model.flat()
    g = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (mse(model.with_flat(theta + e), X, t) - mse(model.with_flat(theta - e), X, t)) / (2 * h)
    return g
