"""The twelve benchmark classifiers behind one fit/predict contract.

``ClassifierSpec.preset(name)`` gives the default configuration of a variant;
``fit(spec, fm)`` trains on a FeatureMatrix and ``predict(model, X)`` returns
0/1 labels (1 = positive class).
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ..errors import ConfigError, DegenerateData, DimensionMismatch
from ..preprocess import FeatureMatrix
from .discriminant import DiscriminantModel, discriminant_score, fit_discriminant
from .knn import KnnModel, fit_knn, knn_vote
from .neural import NnModel, fit_nn_gd, fit_nn_lm, nn_gradient
from .svm import SvmModel, fit_svm, smo_train
from .tree import TreeModel, fit_tree, split_score

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1

VARIANTS = (
    "decision_tree",
    "linear_discriminant",
    "quadratic_discriminant",
    "linear_svm",
    "quadratic_svm",
    "fine_knn",
    "medium_knn",
    "cosine_knn",
    "cubic_knn",
    "weighted_knn",
    "ffbpnn_gd",
    "ffbpnn_lm",
)

DISPLAY_NAMES = {
    "decision_tree": "Decision Tree",
    "linear_discriminant": "Linear Discriminant",
    "quadratic_discriminant": "Quadratic Discriminant",
    "linear_svm": "Linear SVM",
    "quadratic_svm": "Quadratic SVM",
    "fine_knn": "Fine KNN",
    "medium_knn": "Medium KNN",
    "cosine_knn": "Cosine KNN",
    "cubic_knn": "Cubic KNN",
    "weighted_knn": "Weighted KNN",
    "ffbpnn_gd": "FFBPNN (GD)",
    "ffbpnn_lm": "FFBPNN (LM)",
}


@dataclass(frozen=True)
class TreeParams:
    criterion: str = "gini"
    min_leaf: int = 1
    max_depth: int | None = None


@dataclass(frozen=True)
class DiscriminantParams:
    kind: str = "linear"
    pooled: bool | None = None


@dataclass(frozen=True)
class SvmParams:
    C: float = 1.0
    kernel: str = "linear"
    tol: float = 1e-3
    max_passes: int | None = None   # pair-update budget, default 200 * n


@dataclass(frozen=True)
class KnnParams:
    k: int = 10
    metric: str = "euclidean"
    weighting: str = "uniform"


@dataclass(frozen=True)
class NnParams:
    trainer: str = "gd"
    hidden_units: int = 10
    activation: str = "sigmoid"
    learning_rate: float = 0.05
    max_epochs: int = 2000
    lm_damping: float = 1e-3
    lm_factor: float = 10.0
    seed: int = 0


FAMILY_OF = {
    "decision_tree": "tree",
    "linear_discriminant": "discriminant",
    "quadratic_discriminant": "discriminant",
    "linear_svm": "svm",
    "quadratic_svm": "svm",
    "fine_knn": "knn",
    "medium_knn": "knn",
    "cosine_knn": "knn",
    "cubic_knn": "knn",
    "weighted_knn": "knn",
    "ffbpnn_gd": "nn",
    "ffbpnn_lm": "nn",
}

PRESETS = {
    "decision_tree": TreeParams(),
    "linear_discriminant": DiscriminantParams("linear"),
    "quadratic_discriminant": DiscriminantParams("quadratic"),
    "linear_svm": SvmParams(kernel="linear"),
    "quadratic_svm": SvmParams(kernel="poly2"),
    "fine_knn": KnnParams(k=1),
    "medium_knn": KnnParams(k=10),
    "cosine_knn": KnnParams(k=10, metric="cosine"),
    "cubic_knn": KnnParams(k=10, metric="minkowski3"),
    "weighted_knn": KnnParams(k=10, weighting="squared_inverse"),
    "ffbpnn_gd": NnParams(trainer="gd", learning_rate=0.05, max_epochs=2000),
    "ffbpnn_lm": NnParams(trainer="lm", max_epochs=200),
}


def _check_params(variant, p):
    if isinstance(p, TreeParams):
        ok = p.criterion in ("gini", "info_gain", "entropy") and p.min_leaf >= 1 and (
            p.max_depth is None or p.max_depth >= 1)
    elif isinstance(p, DiscriminantParams):
        ok = p.kind in ("linear", "quadratic")
    elif isinstance(p, SvmParams):
        ok = p.C > 0 and 0 < p.tol < 1 and p.kernel in ("linear", "poly2") and (
            p.max_passes is None or p.max_passes >= 1)
    elif isinstance(p, KnnParams):
        ok = p.k >= 1 and p.metric in ("euclidean", "cosine", "minkowski3") and p.weighting in (
            "uniform", "squared_inverse")
    elif isinstance(p, NnParams):
        ok = (p.trainer in ("gd", "lm") and p.hidden_units >= 1 and p.max_epochs >= 1
              and p.learning_rate >= 0 and p.lm_damping > 0 and p.lm_factor > 1
              and p.activation in ("sigmoid", "identity"))
    else:
        ok = False
    if not ok:
        raise ConfigError(f"invalid hyperparameters for {variant}: {p}")


@dataclass(frozen=True)
class ClassifierSpec:
    variant: str
    params: object = field(default=None)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown classifier {self.variant!r}; choose from {', '.join(VARIANTS)}")
        if self.params is None:
            object.__setattr__(self, "params", PRESETS[self.variant])
        _check_params(self.variant, self.params)

    @classmethod
    def preset(cls, variant, **overrides):
        spec = cls(variant)
        return spec.with_overrides(overrides) if overrides else spec

    @property
    def family(self):
        return FAMILY_OF[self.variant]

    @property
    def display_name(self):
        return DISPLAY_NAMES[self.variant]

    @property
    def needs_standardization(self):
        # trees only compare values within a column, so scaling cannot change them
        return self.family != "tree"

    def with_overrides(self, overrides):
        valid = {f.name: f.type for f in fields(self.params)}
        unknown = set(overrides) - set(valid)
        if unknown:
            raise ConfigError(f"unknown hyperparameter(s) for {self.variant}: {', '.join(sorted(unknown))}")
        return ClassifierSpec(self.variant, replace(self.params, **overrides))

    def with_seed(self, seed):
        if isinstance(self.params, NnParams):
            return ClassifierSpec(self.variant, replace(self.params, seed=int(seed)))
        return self

    def to_dict(self):
        return {"variant": self.variant, "params": asdict(self.params)}


def fit(spec: ClassifierSpec, fm: FeatureMatrix):
    """Train the variant described by ``spec`` on ``fm``."""
    X, y = fm.values, fm.labels
    if X.shape[0] == 0:
        raise DegenerateData("cannot fit on an empty feature matrix")
    p = spec.params
    family = spec.family
    if family == "tree":
        return fit_tree(X, y, p.criterion, p.min_leaf, p.max_depth)
    if family == "discriminant":
        return fit_discriminant(X, y, p.kind, p.pooled)
    if family == "svm":
        model = fit_svm(X, y, p.kernel, p.C, p.tol, p.max_passes)
        if not model.converged:
            log.warning("%s: SMO hit its iteration budget", spec.variant)
        return model
    if family == "knn":
        return fit_knn(X, y, p.k, p.metric, p.weighting)
    if p.trainer == "gd":
        return fit_nn_gd(X, y, p.hidden_units, p.learning_rate, p.max_epochs, p.seed)
    model = fit_nn_lm(X, y, p.hidden_units, p.lm_damping, p.lm_factor, p.max_epochs, p.seed)
    if not model.converged:
        log.debug("%s: LM stopped after %d epochs", spec.variant, model.epochs)
    return model


def predict(model, X):
    X = np.asarray(X.values if isinstance(X, FeatureMatrix) else X, dtype=np.float64)
    if X.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got shape {X.shape}")
    return model.predict(X)


MODEL_TYPES = {
    "tree": TreeModel,
    "discriminant": DiscriminantModel,
    "svm": SvmModel,
    "knn": KnnModel,
    "nn": NnModel,
}


def model_to_dict(model):
    return {"format_version": MODEL_FORMAT_VERSION, "family": model.family, "model": model.to_dict()}


def model_from_dict(d):
    if d.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {d.get('format_version')!r}")
    return MODEL_TYPES[d["family"]].from_dict(d["model"])


def model_to_json(model):
    return json.dumps(model_to_dict(model))


def model_from_json(text):
    return model_from_dict(json.loads(text))


__all__ = [
    "VARIANTS", "DISPLAY_NAMES", "ClassifierSpec", "TreeParams", "DiscriminantParams",
    "SvmParams", "KnnParams", "NnParams", "fit", "predict", "model_to_json",
    "model_from_json", "split_score", "discriminant_score", "smo_train", "knn_vote",
    "nn_gradient", "TreeModel", "DiscriminantModel", "SvmModel", "KnnModel", "NnModel",
]
