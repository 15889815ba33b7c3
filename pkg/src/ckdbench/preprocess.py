"""Missing-value imputation, one-hot encoding and z-scoring."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .dataset_io import INTEGER, Dataset
from .errors import AllMissingForClass, DimensionMismatch, PlanGap, ResidualMissing

WHOLE_DATASET = "whole"
TRAIN_FOLD_ONLY = "train_fold"
SCOPES = (WHOLE_DATASET, TRAIN_FOLD_ONLY)

# one place for the class encoding used by every model
POSITIVE = 1
NEGATIVE = 0

STD_EPSILON = 1e-12


@dataclass(frozen=True)
class ImputationPlan:
    """Fill values per attribute and class label, plus class-agnostic fallbacks.

    ``by_class[attr][label]`` is a float (mean) for numeric and discrete
    attributes and a token (mode) for nominal ones. ``overall`` holds the
    same statistics computed without regard to the label; it is used for
    rows whose label must not be consulted.
    """

    by_class: dict[str, dict[str, object]]
    overall: dict[str, object]
    scope: str = WHOLE_DATASET

    def to_dict(self):
        return {"scope": self.scope, "by_class": self.by_class, "overall": self.overall}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, d):
        return cls(d["by_class"], d["overall"], d.get("scope", WHOLE_DATASET))


def _mode(values, allowed):
    counts = Counter(values)
    best = max(counts.values())
    # ties go to the earliest allowed value
    for v in allowed:
        if counts.get(v, 0) == best:
            return v
    raise AssertionError("mode not among allowed values")


def _fill_value(values, kind):
    if kind.is_nominal:
        return _mode(values, kind.values)
    return float(np.mean(np.asarray(values, dtype=np.float64)))


def build_imputation_plan(ds: Dataset, scope: str = WHOLE_DATASET) -> ImputationPlan:
    """Class-conditional mean (numeric/discrete) or mode (nominal) per attribute.

    The plan is computed from all rows of ``ds``; with ``TRAIN_FOLD_ONLY``
    the caller passes only the training rows.
    """
    if scope not in SCOPES:
        raise ValueError(f"unknown imputation scope {scope!r}")
    schema = ds.schema
    labels = (schema.positive_label, schema.negative_label)
    present = [lab for lab in labels if lab in ds.labels]
    by_class, overall = {}, {}
    for j, (name, kind) in enumerate(schema.attributes):
        by_class[name] = {}
        for label in present:
            observed = [row[j] for row, lab in zip(ds.cells, ds.labels)
                        if lab == label and row[j] is not None]
            if not observed:
                raise AllMissingForClass(
                    f"attribute {name} has no observed value in class {label}"
                )
            by_class[name][label] = _fill_value(observed, kind)
        observed = [row[j] for row in ds.cells if row[j] is not None]
        if observed:
            overall[name] = _fill_value(observed, kind)
    return ImputationPlan(by_class, overall, scope)


def impute(ds: Dataset, plan: ImputationPlan, use_labels: bool = True) -> Dataset:
    """Replace every missing cell with the plan's fill value.

    With ``use_labels`` the fill comes from the row's own class; otherwise
    from the class-agnostic statistic.
    """
    schema = ds.schema
    names = schema.names
    out = []
    for i, (row, label) in enumerate(zip(ds.cells, ds.labels)):
        if None not in row:
            out.append(row)
            continue
        filled = list(row)
        for j, v in enumerate(row):
            if v is not None:
                continue
            name = names[j]
            try:
                filled[j] = plan.by_class[name][label] if use_labels else plan.overall[name]
            except KeyError:
                source = f"class {label}" if use_labels else "overall"
                raise PlanGap(f"row {i}: no {source} fill value for {name}") from None
        out.append(tuple(filled))
    return Dataset(schema, tuple(out), ds.labels)


def round_for_display(plan: ImputationPlan, ds_schema) -> dict:
    """Plan with discrete-integer means rounded to the nearest integer, for reports only."""
    kinds = dict(ds_schema.attributes)
    rounded = {}
    for name, per_class in plan.by_class.items():
        if kinds[name].kind == INTEGER:
            rounded[name] = {lab: int(round(v)) for lab, v in per_class.items()}
        else:
            rounded[name] = dict(per_class)
    return rounded


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2:
            raise DimensionMismatch("values must be 2-D")
        if self.values.shape[0] != self.labels.shape[0]:
            raise DimensionMismatch(
                f"{self.values.shape[0]} rows but {self.labels.shape[0]} labels"
            )
        if self.values.shape[1] != len(self.feature_names):
            raise DimensionMismatch("feature_names does not match column count")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix has non-finite entries")

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_features(self):
        return self.values.shape[1]

    def take(self, idx):
        idx = np.asarray(idx, dtype=int)
        return FeatureMatrix(self.values[idx], self.feature_names, self.labels[idx])

    def with_values(self, values):
        return FeatureMatrix(values, self.feature_names, self.labels)


def feature_names(schema):
    names = []
    for name, kind in schema.attributes:
        if kind.is_nominal:
            names += [f"{name}={v}" for v in kind.values]
        else:
            names.append(name)
    return tuple(names)


def encode(ds: Dataset) -> FeatureMatrix:
    """One-hot nominal attributes (allowed-value order), pass numbers through."""
    schema = ds.schema
    names = feature_names(schema)
    X = np.zeros((len(ds), len(names)))
    col = 0
    for j, (name, kind) in enumerate(schema.attributes):
        if kind.is_nominal:
            position = {v: k for k, v in enumerate(kind.values)}
            for i, row in enumerate(ds.cells):
                v = row[j]
                if v is None:
                    raise ResidualMissing(f"row {i}, attribute {name} is still missing")
                X[i, col + position[v]] = 1.0
            col += len(kind.values)
        else:
            for i, row in enumerate(ds.cells):
                v = row[j]
                if v is None:
                    raise ResidualMissing(f"row {i}, attribute {name} is still missing")
                X[i, col] = v
            col += 1
    y = np.array([POSITIVE if lab == schema.positive_label else NEGATIVE for lab in ds.labels],
                 dtype=np.int64)
    return FeatureMatrix(X, names, y)


@dataclass(frozen=True)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray = field(repr=False)

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        # constant columns are only centred
        std = np.where(std < STD_EPSILON, 1.0, std)
        return cls(mean, std)

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.mean.shape[0]:
            raise DimensionMismatch(
                f"matrix has {X.shape[-1]} columns, stats cover {self.mean.shape[0]}"
            )
        return (X - self.mean) / self.std


def standardize(fm: FeatureMatrix, stats: StandardizationStats | None = None):
    """Z-score ``fm``; fits population statistics on ``fm`` itself when ``stats`` is None.

    Returns ``(standardized matrix, stats used)``.
    """
    if stats is None:
        stats = StandardizationStats.fit(fm.values)
    return fm.with_values(stats.apply(fm.values)), stats
