"""Run every configured classifier on one fold plan and tabulate the results."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from dataclasses import dataclass, field

from .. import __version__
from ..classifiers import DISPLAY_NAMES, VARIANTS
from ..dataset_io import Dataset, load_dataset, to_arff
from ..errors import FoldError
from ..evaluation import METRIC_NAMES, EvalResult, cross_validate, kfold_partition
from ..preprocess import POSITIVE
from .config import BenchConfig

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
COLUMNS = ("Classifier", "Accuracy", "Sensitivity", "Precision", "Specificity")


@dataclass
class BenchReport:
    config: dict
    config_hash: str
    dataset_sha256: str
    n_rows: int
    plan_hash: str
    results: dict[str, EvalResult]
    failures: dict[str, str]
    order: list[str]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ranking(self):
        """Variants by pooled accuracy, best first; canonical order breaks ties, failures last."""
        canon = {v: i for i, v in enumerate(VARIANTS)}
        ok = sorted(self.results, key=lambda v: (-self.results[v].pooled_metrics.accuracy, canon[v]))
        return ok + [v for v in self.order if v in self.failures]

    def rows(self):
        """Variants present in the report, in canonical table order."""
        return [v for v in VARIANTS if v in self.results or v in self.failures]

    def to_dict(self):
        # wall-clock timings are excluded so reports stay byte-reproducible
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "code_version": __version__,
            "config": self.config,
            "config_hash": self.config_hash,
            "dataset_sha256": self.dataset_sha256,
            "rows": self.n_rows,
            "plan_hash": self.plan_hash,
            "ranking": self.ranking,
            "classifiers": {
                v: {"name": DISPLAY_NAMES[v], **self.results[v].to_dict()} for v in self.rows()
                if v in self.results
            },
            "failures": dict(self.failures),
        }


def dataset_digest(ds: Dataset):
    return hashlib.sha256(to_arff(ds).encode()).hexdigest()


def run_benchmark(config: BenchConfig, dataset: Dataset | None = None) -> BenchReport:
    """Evaluate every configured classifier on one shared fold plan."""
    ds = dataset if dataset is not None else load_dataset(
        config.dataset_path, config.format, fractional=config.fractional_integers)
    truth = [POSITIVE if lab == ds.schema.positive_label else 0 for lab in ds.labels]
    plan = kfold_partition(len(ds), config.folds, config.seed, config.stratified, truth)
    results, failures, timings = {}, {}, {}
    for spec in config.classifiers:
        start = time.perf_counter()
        try:
            results[spec.variant] = cross_validate(spec, ds, plan, config.scope)
        except FoldError as exc:
            failures[spec.variant] = str(exc)
            log.error("%s failed: %s", spec.variant, exc)
        timings[spec.variant] = time.perf_counter() - start
        log.info("%-22s %.2fs", spec.variant, timings[spec.variant])
    return BenchReport(
        config=config.echo(),
        config_hash=config.digest(),
        dataset_sha256=dataset_digest(ds),
        n_rows=len(ds),
        plan_hash=plan.digest(),
        results=results,
        failures=failures,
        order=[s.variant for s in config.classifiers],
        timings=timings,
    )


def fmt_metric(value):
    return "n/a" if value is None else f"{value:.4f}"


def table_rows(report: BenchReport, view="pooled"):
    rows = []
    for v in report.rows():
        if v in report.failures:
            rows.append([DISPLAY_NAMES[v]] + ["failed"] * 4)
            continue
        res = report.results[v]
        metrics = res.pooled_metrics if view == "pooled" else res.fold_mean
        rows.append([DISPLAY_NAMES[v]] + [fmt_metric(getattr(metrics, m)) for m in METRIC_NAMES])
    return rows


def _text_table(header, rows):
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) if i == 0 else str(c).rjust(w)
                       for i, (c, w) in enumerate(zip(r, widths))) for r in [header] + rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_table(report: BenchReport, format="text") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(COLUMNS)
        writer.writerows(table_rows(report))
        return buf.getvalue()
    if format == "text":
        k = report.config.get("folds")
        parts = [
            f"Pooled out-of-fold metrics ({k}-fold, seed {report.config.get('seed')})",
            _text_table(COLUMNS, table_rows(report)),
            "",
            "Mean of per-fold metrics",
            _text_table(COLUMNS, table_rows(report, view="fold_mean")),
        ]
        return "\n".join(parts) + "\n"
    raise ValueError(f"unknown table format {format!r}")
