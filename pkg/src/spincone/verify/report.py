"""Check records, reports and their text/JSON rendering."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .. import __version__

JSON_CHECK_KEYS = ("id", "anchor", "geometry", "samples", "max_residual", "tolerance", "pass")


@dataclass(frozen=True)
class CheckResult:
    id: str
    anchor: str
    geometry: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    worst_point: tuple | None = None
    message: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "geometry": self.geometry,
            "samples": self.samples,
            "max_residual": _finite(self.max_residual),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"{status} {self.id} [{self.anchor}] geometry={self.geometry} samples={self.samples} "
                f"max_residual={self.max_residual:.3e} tolerance={self.tolerance:.1e}")
        if self.worst_point is not None:
            line += " worst=(" + ", ".join(f"{v:.6g}" for v in self.worst_point) + ")"
        if self.message:
            line += f" -- {self.message}"
        return line


def _finite(v: float):
    return v if math.isfinite(v) else None


@dataclass
class Report:
    config: dict
    seed: int
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def sorted_checks(self):
        return sorted(self.checks, key=lambda c: (c.id, c.geometry))

    def to_json(self) -> str:
        doc = {
            "version": __version__,
            "config": self.config,
            "checks": [c.to_json() for c in self.sorted_checks()],
            "summary": {"passed": self.passed, "failed": self.failed},
            "seed": self.seed,
        }
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = [c.to_text() for c in self.sorted_checks()]
        lines.append(f"summary: {self.passed} passed, {self.failed} failed "
                     f"(seed {self.seed}, wall time {self.wall_time:.1f} s)")
        return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text", path=None, stream=None) -> None:
    """Write ``report`` as text or JSON to ``path``, or to ``stream`` when no path is given."""
    if fmt not in ("text", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    body = report.to_json() if fmt == "json" else report.to_text()
    if path is None:
        import sys
        (stream or sys.stdout).write(body)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(body)


class Accumulator:
    """Running maximum of a residual over samples, remembering the worst point."""

    def __init__(self, id: str, anchor: str, geometry: str, tolerance: float):
        self.id, self.anchor, self.geometry, self.tolerance = id, anchor, geometry, tolerance
        self.samples = 0
        self.worst = -math.inf
        self.point = None
        self.message = ""
        self.forced_fail = False

    def add(self, residual, point=None) -> None:
        residual = float(residual)
        self.samples += 1
        if not math.isfinite(residual):
            self.forced_fail = True
        if residual > self.worst or not math.isfinite(residual):
            self.worst = residual
            self.point = None if point is None else tuple(float(v) for v in np.ravel(point))

    def fail(self, message: str, residual: float = math.inf, point=None) -> None:
        self.forced_fail = True
        self.message = message
        self.add(residual, point)

    def result(self) -> CheckResult:
        worst = self.worst if self.samples else math.inf
        passed = (not self.forced_fail) and self.samples > 0 and worst <= self.tolerance
        return CheckResult(self.id, self.anchor, self.geometry, self.samples, worst,
                           self.tolerance, passed, None if passed else self.point, self.message)
