"""Benchmark harness: configuration, report tables, charts and the CLI."""

from .config import BenchConfig, load_config, parse_config
from .plots import render_charts
from .report import BenchReport, render_table, run_benchmark

__all__ = ["BenchConfig", "BenchReport", "load_config", "parse_config", "render_charts",
           "render_table", "run_benchmark"]
