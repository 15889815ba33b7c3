"""Command-line entry point.

    ckdbench run CONFIG [--seed N] [--out DIR] [--format text,csv,json,svg]
    ckdbench inspect DATASET [--format text|json] [--schema]
    ckdbench validate CONFIG

Exit codes: 0 success, 2 usage or config error, 3 data error, 4 internal
error or a classifier that failed during ``run``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..dataset_io import CKD_SCHEMA, load_dataset, summarize
from ..errors import ConfigError, DataError
from .config import load_config
from .plots import render_charts
from .report import render_table, run_benchmark

log = logging.getLogger("ckdbench")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4

TABLE_FILES = {"text": "table.txt", "csv": "table.csv", "json": "report.json"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="ckdbench", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="cross-validate the configured classifiers")
    run.add_argument("config", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path, help="output directory")
    run.add_argument("--format", help="comma-separated subset of text,csv,json,svg")

    insp = sub.add_parser("inspect", help="summarize a dataset file")
    insp.add_argument("dataset", type=Path)
    insp.add_argument("--format", choices=("text", "json"), default="text")
    insp.add_argument("--data-format", choices=("arff", "csv"))
    insp.add_argument("--fractional-integers", choices=("error", "keep"), default="error")
    insp.add_argument("--schema", action="store_true", help="print the embedded schema as JSON instead")

    val = sub.add_parser("validate", help="check a config and its dataset without training")
    val.add_argument("config", type=Path)
    val.add_argument("--seed", type=int)
    val.add_argument("--out", type=Path)
    val.add_argument("--format")
    return parser


def _load(args):
    config = load_config(args.config)
    return config.with_overrides(args.seed, args.out, args.format)


def cmd_run(args):
    config = _load(args)
    report = run_benchmark(config)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    for fmt in config.formats:
        if fmt == "svg":
            for name, svg in render_charts(report).items():
                (out / name).write_text(svg, encoding="utf-8")
        else:
            (out / TABLE_FILES[fmt]).write_text(render_table(report, fmt), encoding="utf-8")
    timings = {v: round(t, 3) for v, t in report.timings.items()}
    (out / "timings.json").write_text(json.dumps(timings, indent=2) + "\n", encoding="utf-8")
    sys.stdout.write(render_table(report, "text"))
    log.info("wrote %s", out)
    if report.failures:
        for v, msg in report.failures.items():
            print(f"ckdbench: {v} failed: {msg}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_inspect(args):
    if args.schema:
        sys.stdout.write(CKD_SCHEMA.to_json() + "\n")
        return EXIT_OK
    ds = load_dataset(args.dataset, args.data_format, fractional=args.fractional_integers)
    summary = summarize(ds)
    if args.format == "json":
        sys.stdout.write(json.dumps(summary.to_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(summary.to_text())
    return EXIT_OK


def cmd_validate(args):
    config = _load(args)
    if not config.dataset_path.is_file():
        raise DataError(f"dataset not found: {config.dataset_path}")
    ds = load_dataset(config.dataset_path, config.format, fractional=config.fractional_integers)
    if config.folds > len(ds):
        raise ConfigError(f"folds={config.folds} exceeds the {len(ds)} rows")
    names = ", ".join(c.variant for c in config.classifiers)
    print(f"ok: {len(ds)} rows, {config.folds} folds, seed {config.seed}, classifiers: {names}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "inspect": cmd_inspect, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"ckdbench: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"ckdbench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"ckdbench: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def cli_main(argv=None):
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
