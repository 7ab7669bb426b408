"""Verification suites, reports and the command-line runner."""

from .config import Config, load_config, parse_config
from .report import CheckResult, Report, emit_report
from .runner import run_all, run_suite, run_suites
from .suites import SUITES, list_suites

__all__ = [
    "CheckResult", "Config", "Report", "SUITES", "emit_report", "list_suites", "load_config",
    "parse_config", "run_all", "run_suite", "run_suites",
]
