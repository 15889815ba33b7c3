"""Strict INI configuration for benchmark runs.

Example::

    [data]
    path = chronic_kidney_disease.arff
    format = arff

    [cv]
    seed = 1
    folds = 5
    stratified = false
    imputation = whole

    [classifiers]
    run = all

    [hp.ffbpnn_gd]
    learning_rate = 0.05

    [output]
    dir = results
    formats = text, csv, json, svg

Unknown sections or keys are errors; so are hyperparameters a variant
does not have.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import typing
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..classifiers import VARIANTS, ClassifierSpec
from ..errors import ConfigError
from ..preprocess import SCOPES, WHOLE_DATASET

OUTPUT_FORMATS = ("text", "csv", "json", "svg")

_ALLOWED = {
    "data": {"path", "format", "fractional_integers"},
    "cv": {"seed", "folds", "stratified", "imputation"},
    "classifiers": {"run"},
    "output": {"dir", "formats"},
}


@dataclass(frozen=True)
class BenchConfig:
    dataset_path: Path
    format: str = "arff"
    fractional_integers: str = "error"
    seed: int = 1
    folds: int = 5
    stratified: bool = False
    scope: str = WHOLE_DATASET
    classifiers: tuple[ClassifierSpec, ...] = ()
    out_dir: Path = Path("results")
    formats: tuple[str, ...] = OUTPUT_FORMATS
    dataset_label: str = ""

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError(f"folds must be at least 2, got {self.folds}")
        if not self.classifiers:
            raise ConfigError("classifier list is empty")
        if self.format not in ("arff", "csv"):
            raise ConfigError(f"format must be arff or csv, got {self.format!r}")
        if self.scope not in SCOPES:
            raise ConfigError(f"imputation must be one of {SCOPES}, got {self.scope!r}")
        if self.fractional_integers not in ("error", "keep"):
            raise ConfigError("fractional_integers must be 'error' or 'keep'")
        bad = set(self.formats) - set(OUTPUT_FORMATS)
        if bad or not self.formats:
            raise ConfigError(f"output formats must be a non-empty subset of {OUTPUT_FORMATS}")

    def echo(self):
        """Everything that influences results; output location is excluded."""
        return {
            "dataset": self.dataset_label or self.dataset_path.name,
            "format": self.format,
            "fractional_integers": self.fractional_integers,
            "seed": self.seed,
            "folds": self.folds,
            "stratified": self.stratified,
            "imputation": self.scope,
            "classifiers": [c.to_dict() for c in self.classifiers],
        }

    def digest(self):
        return hashlib.sha256(json.dumps(self.echo(), sort_keys=True).encode()).hexdigest()

    def with_overrides(self, seed=None, out_dir=None, formats=None):
        changes = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if out_dir is not None:
            changes["out_dir"] = Path(out_dir)
        if formats is not None:
            changes["formats"] = parse_formats(formats)
        return replace(self, **changes) if changes else self


def parse_formats(text):
    items = tuple(s.strip().lower() for s in text.split(",") if s.strip())
    bad = [s for s in items if s not in OUTPUT_FORMATS]
    if bad:
        raise ConfigError(f"unknown output format(s): {', '.join(bad)}")
    return items


def _bool(section, key, text):
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {text!r}")


def _int(section, key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {text!r}") from None


def _coerce(section, key, text, hint):
    args = typing.get_args(hint)
    if type(None) in args:
        if text.strip().lower() in ("none", ""):
            return None
        hint = next(a for a in args if a is not type(None))
    if hint is bool:
        return _bool(section, key, text)
    if hint is int:
        return _int(section, key, text)
    if hint is float:
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None
    return text.strip()


def _hp_overrides(variant, section):
    base = ClassifierSpec.preset(variant).params
    hints = typing.get_type_hints(type(base))
    names = {f.name for f in fields(base)}
    out = {}
    for key, text in section.items():
        if key not in names:
            raise ConfigError(f"[hp.{variant}] unknown hyperparameter {key!r}")
        out[key] = _coerce(f"hp.{variant}", key, text, hints[key])
    return out


def parse_config(text, base_dir=Path(".")) -> BenchConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None

    overrides = {}
    for name in parser.sections():
        if name.startswith("hp."):
            variant = name[3:]
            if variant not in VARIANTS:
                raise ConfigError(f"[{name}] names an unknown classifier")
            overrides[variant] = _hp_overrides(variant, parser[name])
        elif name not in _ALLOWED:
            raise ConfigError(f"unknown section [{name}]")
        else:
            unknown = set(parser[name]) - _ALLOWED[name]
            if unknown:
                raise ConfigError(f"[{name}] unknown key(s): {', '.join(sorted(unknown))}")

    if not parser.has_option("data", "path"):
        raise ConfigError("[data] path is required")
    data = parser["data"]
    raw_path = data["path"].strip()
    path = Path(raw_path)
    if not path.is_absolute():
        path = base_dir / path
    fmt = data.get("format", "").strip().lower() or ("csv" if path.suffix.lower() == ".csv" else "arff")

    cv = parser["cv"] if parser.has_section("cv") else {}
    run = parser.get("classifiers", "run", fallback="all").strip()
    if run.lower() == "all":
        names = list(VARIANTS)
    else:
        names = [s.strip() for s in run.split(",") if s.strip()]
        if not names:
            raise ConfigError("[classifiers] run lists no classifiers")
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ConfigError(f"[classifiers] duplicate entries: {', '.join(sorted(dupes))}")
    stray = set(overrides) - set(names)
    if stray:
        raise ConfigError(f"hyperparameters given for classifiers not being run: {', '.join(sorted(stray))}")
    specs = tuple(ClassifierSpec.preset(n, **overrides.get(n, {})) for n in names)

    output = parser["output"] if parser.has_section("output") else {}
    out_dir = Path(output.get("dir", "results").strip())
    if not out_dir.is_absolute():
        out_dir = base_dir / out_dir

    return BenchConfig(
        dataset_path=path,
        format=fmt,
        fractional_integers=data.get("fractional_integers", "error").strip(),
        seed=_int("cv", "seed", cv.get("seed", "1")),
        folds=_int("cv", "folds", cv.get("folds", "5")),
        stratified=_bool("cv", "stratified", cv.get("stratified", "false")),
        scope=cv.get("imputation", WHOLE_DATASET).strip(),
        classifiers=specs,
        out_dir=out_dir,
        formats=parse_formats(output.get("formats", ",".join(OUTPUT_FORMATS))),
        dataset_label=raw_path,
    )


def load_config(path) -> BenchConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)
