"""Running suites and assembling reports."""

from __future__ import annotations

import time

from .catalog import GeometryCache
from .config import Config, require_suite
from .report import Report
from .suites import SUITES, Context, list_suites, run_suite_checks


def run_suites(names, config: Config | None = None, geometry_override=None) -> Report:
    """Run the named suites (sorted by name) and return one report."""
    config = Config() if config is None else config
    names = sorted(set(names))
    for name in names:
        require_suite(name)
    engine = config.diff_engine()
    settings = {name: config.suite_settings(name, geometry_override) for name in names}
    cache = GeometryCache(engine, config.geometries)
    echo = {
        "engine": {"scheme": engine.scheme, "step": engine.step},
        "geometries": {k: dict(v) for k, v in sorted(config.geometries.items())},
        "suites": settings,
    }
    report = Report(config=echo, seed=config.seed)
    start = time.perf_counter()
    for name in names:
        suite = SUITES[name]
        s = settings[name]
        ctx = Context(name, suite.anchor, config.seed, engine, s["samples"], s["tolerances"], cache)
        report.checks.extend(run_suite_checks(suite, ctx, s["geometries"]))
    report.wall_time = time.perf_counter() - start
    return report


def run_suite(name: str, config: Config | None = None, geometry_override=None) -> Report:
    return run_suites([name], config, geometry_override)


def run_all(config: Config | None = None) -> Report:
    return run_suites(list_suites(), config)
