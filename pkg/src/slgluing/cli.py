"""Command-line entry point: ``slgluing <suite> [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_flat_config
from .report import OUT_ENV, SUITES, build_config, emit_reports, table_text
from .suites import run_suite

_OVERRIDES = (("t_min_exp", int), ("t_max_exp", int), ("quad_tol", float), ("fit_tol", float))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slgluing",
        description="Numerical verification of the glued branched special Lagrangian family.",
        epilog=f"The output directory defaults to ${OUT_ENV}, or ./out when unset.")
    sub = parser.add_subparsers(dest="suite", required=True, metavar="SUITE")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value configuration file")
    common.add_argument("--out", type=Path, help="directory for the report files")
    common.add_argument("--seed", type=int, help="seed for every random draw")
    for name, kind in _OVERRIDES:
        common.add_argument("--" + name.replace("_", "-"), type=kind, dest=name)
    for name in SUITES:
        sub.add_parser(name, parents=[common], help=f"run the {name} suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = parse_flat_config(args.config.read_text()) if args.config else {}
        for name, _ in _OVERRIDES:
            val = getattr(args, name)
            if val is not None:
                values = {k: v for k, v in values.items() if k.rsplit(".", 1)[-1] != name}
                values[f"model.{name}"] = val
        cfg = build_config(values, suite=args.suite, out_dir=args.out, seed=args.seed)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    for msg in cfg.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    report = run_suite(cfg)
    try:
        paths = emit_reports(report, cfg.out_dir)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    sys.stdout.write(table_text(report))
    print(f"reports written to {paths['summary'].parent}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
