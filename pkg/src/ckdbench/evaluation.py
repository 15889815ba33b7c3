"""k-fold cross-validation and the four confusion-matrix metrics."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classifiers import ClassifierSpec, fit, predict
from .dataset_io import Dataset
from .errors import BadK, CkdBenchError, EmptyMatrix, FoldError, LengthMismatch
from .preprocess import (
    NEGATIVE,
    POSITIVE,
    TRAIN_FOLD_ONLY,
    WHOLE_DATASET,
    build_imputation_plan,
    encode,
    impute,
    standardize,
)

METRIC_NAMES = ("accuracy", "sensitivity", "precision", "specificity")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple[int, ...]
    seed: int
    stratified: bool = False

    @property
    def n(self):
        return len(self.assignments)

    def test_indices(self, fold):
        return np.flatnonzero(np.asarray(self.assignments) == fold)

    def train_indices(self, fold):
        return np.flatnonzero(np.asarray(self.assignments) != fold)

    def sizes(self):
        return np.bincount(np.asarray(self.assignments), minlength=self.k).tolist()

    def digest(self):
        payload = json.dumps([self.k, list(self.assignments)]).encode()
        return hashlib.sha256(payload).hexdigest()


def kfold_partition(n, k, seed=0, stratified=False, labels=None) -> FoldPlan:
    """Seeded shuffle, then round-robin fold assignment.

    With ``stratified`` each class is shuffled separately and the classes
    are dealt out one after another, so every fold gets its share of both.
    """
    if not 2 <= k <= n:
        raise BadK(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    if stratified:
        if labels is None or len(labels) != n:
            raise ValueError("stratified partition needs one label per row")
        labels = np.asarray(labels)
        order = []
        for cls in sorted(set(labels.tolist()), reverse=True):
            members = np.flatnonzero(labels == cls)
            order.extend(members[rng.permutation(len(members))].tolist())
    else:
        order = rng.permutation(n).tolist()
    assignments = [0] * n
    for pos, row in enumerate(order):
        assignments[row] = pos % k
    return FoldPlan(k, tuple(assignments), int(seed), bool(stratified))


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int
    positive_label: str = "ckd"

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other):
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn,
                               self.fn + other.fn, self.positive_label)

    def swapped(self, negative_label="notckd"):
        """The same outcomes with the roles of the two classes exchanged."""
        return ConfusionMatrix(self.tn, self.fn, self.tp, self.fp, negative_label)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
                "positive_label": self.positive_label}


def confusion(predicted, truth, positive=POSITIVE, positive_label="ckd") -> ConfusionMatrix:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise LengthMismatch(f"{predicted.shape[0]} predictions for {truth.shape[0]} labels")
    p_pos = predicted == positive
    t_pos = truth == positive
    return ConfusionMatrix(
        tp=int(np.sum(p_pos & t_pos)),
        fp=int(np.sum(p_pos & ~t_pos)),
        tn=int(np.sum(~p_pos & ~t_pos)),
        fn=int(np.sum(~p_pos & t_pos)),
        positive_label=positive_label,
    )


@dataclass(frozen=True)
class MetricsReport:
    """Metric values; None marks a ratio whose denominator is zero."""

    accuracy: float | None
    sensitivity: float | None
    precision: float | None
    specificity: float | None

    def as_dict(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _ratio(num, den):
    return num / den if den else None


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has no instances")
    return MetricsReport(
        accuracy=(cm.tp + cm.tn) / cm.total,
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        precision=_ratio(cm.tp, cm.tp + cm.fp),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
    )


def mean_metrics(reports) -> MetricsReport:
    """Per-metric mean over the reports where that metric is defined."""
    out = {}
    for name in METRIC_NAMES:
        vals = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        out[name] = float(np.mean(vals)) if vals else None
    return MetricsReport(**out)


@dataclass
class FoldResult:
    fold: int
    confusion: ConfusionMatrix
    metrics: MetricsReport
    seed: int

    def to_dict(self):
        return {"fold": self.fold, "seed": self.seed, "confusion": self.confusion.to_dict(),
                "metrics": self.metrics.as_dict()}


@dataclass
class EvalResult:
    spec: dict
    seed: int
    pooled: ConfusionMatrix
    pooled_metrics: MetricsReport
    per_fold: list[FoldResult]
    fold_mean: MetricsReport
    predictions: np.ndarray = field(repr=False)
    plan_hash: str = ""
    scope: str = WHOLE_DATASET

    def to_dict(self):
        return {
            "spec": self.spec,
            "seed": self.seed,
            "scope": self.scope,
            "plan_hash": self.plan_hash,
            "code_version": __version__,
            "pooled": {"confusion": self.pooled.to_dict(), "metrics": self.pooled_metrics.as_dict()},
            "fold_mean": self.fold_mean.as_dict(),
            "per_fold": [f.to_dict() for f in self.per_fold],
            "predictions": self.predictions.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def fold_seed(seed, fold):
    """Deterministic per-fold seed derived from the base seed and fold index."""
    return int(np.random.SeedSequence([int(seed), int(fold)]).generate_state(1)[0])


def _fold_data(ds, plan, fold, scope, full):
    train, test = plan.train_indices(fold), plan.test_indices(fold)
    if scope == WHOLE_DATASET:
        return full.take(train), full.take(test)
    train_ds = ds.subset(train)
    imp = build_imputation_plan(train_ds, TRAIN_FOLD_ONLY)
    train_fm = encode(impute(train_ds, imp))
    # held-out rows never see their own label during imputation
    test_fm = encode(impute(ds.subset(test), imp, use_labels=False))
    return train_fm, test_fm


def cross_validate(spec, ds: Dataset, plan: FoldPlan, scope: str = WHOLE_DATASET,
                   standardize_features: bool | None = None) -> EvalResult:
    """Out-of-fold evaluation of one classifier.

    ``spec`` is a ClassifierSpec, or any callable ``(train_fm, test_X) ->
    labels`` for ad-hoc baselines. Whole-dataset imputation happens once,
    before the folds; train-fold imputation is redone inside every fold.
    """
    if plan.n != len(ds):
        raise ValueError(f"fold plan covers {plan.n} rows, dataset has {len(ds)}")
    if scope not in (WHOLE_DATASET, TRAIN_FOLD_ONLY):
        raise ValueError(f"unknown imputation scope {scope!r}")
    is_spec = isinstance(spec, ClassifierSpec)
    if standardize_features is None:
        standardize_features = spec.needs_standardization if is_spec else False
    positive_label = ds.schema.positive_label

    full = encode(impute(ds, build_imputation_plan(ds))) if scope == WHOLE_DATASET else None
    truth = np.array([POSITIVE if lab == positive_label else NEGATIVE for lab in ds.labels])
    predictions = np.full(len(ds), -1, dtype=np.int64)
    folds = []
    for f in range(plan.k):
        seed_f = fold_seed(plan.seed, f)
        try:
            train_fm, test_fm = _fold_data(ds, plan, f, scope, full)
            if standardize_features:
                train_fm, stats = standardize(train_fm)
                test_fm, _ = standardize(test_fm, stats)
            if is_spec:
                model = fit(spec.with_seed(seed_f), train_fm)
                pred = predict(model, test_fm)
            else:
                pred = np.asarray(spec(train_fm, test_fm.values), dtype=np.int64)
        except (CkdBenchError, ArithmeticError, ValueError) as exc:
            raise FoldError(f, exc) from exc
        test = plan.test_indices(f)
        predictions[test] = pred
        cm = confusion(pred, truth[test], positive_label=positive_label)
        folds.append(FoldResult(f, cm, compute_metrics(cm), seed_f))

    pooled = confusion(predictions, truth, positive_label=positive_label)
    return EvalResult(
        spec=spec.to_dict() if is_spec else {"variant": getattr(spec, "__name__", "custom")},
        seed=plan.seed,
        pooled=pooled,
        pooled_metrics=compute_metrics(pooled),
        per_fold=folds,
        fold_mean=mean_metrics([f.metrics for f in folds]),
        predictions=predictions,
        plan_hash=plan.digest(),
        scope=scope,
    )
