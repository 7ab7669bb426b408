"""``spincone`` command line: ``list`` and ``verify``."""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .config import Config, load_config
from .report import emit_report
from .runner import run_suites
from .suites import list_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spincone", description="Numerical verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list the registered suites")
    v = sub.add_parser("verify", help="run verification suites")
    which = v.add_mutually_exclusive_group(required=True)
    which.add_argument("--suite", action="append", metavar="NAME", help="suite to run (repeatable)")
    which.add_argument("--all", action="store_true", help="run every suite")
    v.add_argument("--seed", type=int, help="override the configuration seed")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    v.add_argument("--config", metavar="PATH", help="JSON configuration file")
    v.add_argument("--geometry", action="append", metavar="NAME",
                   help="restrict the run to these geometries (repeatable)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "list":
        for name in list_suites():
            print(name)
        return EXIT_OK
    try:
        config = load_config(args.config) if args.config else Config()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be non-negative")
            config.seed = args.seed
        names = list_suites() if args.all else args.suite
        report = run_suites(names, config, args.geometry)
    except ConfigError as exc:
        print(f"spincone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"spincone: error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out and args.format == "json":
        print(f"{report.passed} passed, {report.failed} failed; report written to {args.out}")
    for c in report.sorted_checks():
        if not c.passed and (args.format == "json"):
            print(c.to_text(), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
