"""Bar charts of the benchmark metrics, rendered to SVG with matplotlib.

Every bar carries an SVG id ``bar-<metric>-<variant>`` and the axes
background the id ``plot-area`` so the figures can be parsed back.
Text is kept as ``<text>`` elements and the output is byte-stable for a
fixed report.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

from matplotlib.backends.backend_svg import FigureCanvasSVG  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from ..classifiers import DISPLAY_NAMES  # noqa: E402

STYLE = {
    "svg.hashsalt": "ckdbench",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}

GROUPED = ("sensitivity", "precision", "specificity")
COLORS = {"accuracy": "#4c72b0", "sensitivity": "#4c72b0", "precision": "#dd8452",
          "specificity": "#55a868"}


def _values(report, metric):
    out = []
    for v in report.rows():
        res = report.results.get(v)
        out.append(None if res is None else getattr(res.pooled_metrics, metric))
    return out


def _svg(fig):
    buf = io.StringIO()
    FigureCanvasSVG(fig).print_svg(buf, metadata={"Date": None, "Creator": "ckdbench"})
    return buf.getvalue()


def _frame(ax, labels, ylabel):
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel(ylabel)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.patch.set_gid("plot-area")


def accuracy_chart(report) -> str:
    variants = report.rows()
    vals = _values(report, "accuracy")
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(max(4.0, 0.7 * len(variants) + 1.5), 4.5))
        ax = fig.add_subplot()
        bars = ax.bar(range(len(variants)), [v or 0.0 for v in vals], width=0.6,
                      color=COLORS["accuracy"])
        for rect, name in zip(bars, variants):
            rect.set_gid(f"bar-accuracy-{name}")
        ax.bar_label(bars, labels=["n/a" if v is None else f"{v:.4f}" for v in vals],
                     padding=2, fontsize=7)
        _frame(ax, [DISPLAY_NAMES[v] for v in variants], "Predictive accuracy")
        ax.set_title("Predictive accuracy per classifier", pad=12)
        fig.tight_layout()
        return _svg(fig)


def metrics_chart(report) -> str:
    variants = report.rows()
    width = 0.8 / len(GROUPED)
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(max(5.0, 1.0 * len(variants) + 2.0), 4.8))
        ax = fig.add_subplot()
        for g, metric in enumerate(GROUPED):
            vals = _values(report, metric)
            xs = [i + (g - 1) * width for i in range(len(variants))]
            bars = ax.bar(xs, [v or 0.0 for v in vals], width=width, color=COLORS[metric],
                          label=metric.capitalize())
            for rect, name in zip(bars, variants):
                rect.set_gid(f"bar-{metric}-{name}")
            ax.bar_label(bars, labels=["n/a" if v is None else f"{v:.4f}" for v in vals],
                         padding=2, fontsize=5, rotation=90)
        _frame(ax, [DISPLAY_NAMES[v] for v in variants], "Value")
        ax.legend(loc="lower center", bbox_to_anchor=(0.5, 1.06), ncols=3, frameon=False,
                  fontsize=8)
        ax.set_title("Sensitivity, precision and specificity per classifier", pad=28)
        fig.tight_layout()
        return _svg(fig)


def render_charts(report) -> dict[str, str]:
    """SVG documents keyed by file name."""
    return {"accuracy.svg": accuracy_chart(report), "metrics.svg": metrics_chart(report)}
