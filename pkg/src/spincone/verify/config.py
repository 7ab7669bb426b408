"""Verifier configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..tensorcalc import SCHEMES, DiffEngine
from .catalog import GEOMETRY_NAMES
from .suites import SUITES

TOP_KEYS = {"engine", "suites", "geometries", "seed"}
SUITE_KEYS = {"samples", "geometries", "tolerances"}
ENGINE_KEYS = {"scheme", "step"}
GEOMETRY_KEYS = {"eps"}


def suggest(name: str, choices) -> str:
    close = difflib.get_close_matches(name, list(choices), n=1, cutoff=0.0)
    return f"; did you mean {close[0]!r}?" if close else ""


def require_suite(name: str) -> None:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}{suggest(name, SUITES)}")


@dataclass
class Config:
    engine: dict = field(default_factory=dict)
    suites: dict = field(default_factory=dict)
    geometries: dict = field(default_factory=dict)
    seed: int = 0

    def diff_engine(self) -> DiffEngine:
        return DiffEngine(self.engine.get("scheme", "richardson"), self.engine.get("step"))

    def suite_settings(self, name: str, geometry_override=None) -> dict:
        suite = SUITES[name]
        raw = self.suites.get(name, {})
        geometries = list(geometry_override or raw.get("geometries") or suite.geometries)
        for g in geometries:
            if g not in GEOMETRY_NAMES:
                raise ConfigError(f"unknown geometry {g!r}{suggest(g, GEOMETRY_NAMES)}")
        return {
            "samples": int(raw.get("samples", suite.samples)),
            "geometries": sorted(geometries),
            "tolerances": {k: float(v) for k, v in sorted(raw.get("tolerances", {}).items())},
        }


def _expect(cond, message):
    if not cond:
        raise ConfigError(message)


def parse_config(doc) -> Config:
    _expect(isinstance(doc, dict), "configuration must be a JSON object")
    extra = set(doc) - TOP_KEYS
    _expect(not extra, f"unknown configuration keys {sorted(extra)}")
    engine = doc.get("engine", {})
    _expect(isinstance(engine, dict) and not set(engine) - ENGINE_KEYS,
            f"engine must be an object with keys from {sorted(ENGINE_KEYS)}")
    if "scheme" in engine:
        _expect(engine["scheme"] in SCHEMES, f"unknown scheme {engine['scheme']!r}; expected one of {SCHEMES}")
    if "step" in engine:
        _expect(isinstance(engine["step"], (int, float)) and engine["step"] > 0, "engine step must be positive")
    suites = doc.get("suites", {})
    _expect(isinstance(suites, dict), "suites must be an object")
    for name, body in suites.items():
        require_suite(name)
        _expect(isinstance(body, dict) and not set(body) - SUITE_KEYS,
                f"suite {name}: keys must come from {sorted(SUITE_KEYS)}")
        if "samples" in body:
            s = body["samples"]
            _expect(isinstance(s, int) and not isinstance(s, bool) and s >= 1,
                    f"suite {name}: samples must be an integer >= 1")
        if "geometries" in body:
            _expect(isinstance(body["geometries"], list) and body["geometries"],
                    f"suite {name}: geometries must be a non-empty list")
        if "tolerances" in body:
            tol = body["tolerances"]
            _expect(isinstance(tol, dict) and all(isinstance(v, (int, float)) and v >= 0 for v in tol.values()),
                    f"suite {name}: tolerances must map check names to non-negative numbers")
    geometries = doc.get("geometries", {})
    _expect(isinstance(geometries, dict), "geometries must be an object")
    for name, body in geometries.items():
        _expect(name in GEOMETRY_NAMES, f"unknown geometry {name!r}{suggest(name, GEOMETRY_NAMES)}")
        _expect(isinstance(body, dict) and not set(body) - GEOMETRY_KEYS,
                f"geometry {name}: keys must come from {sorted(GEOMETRY_KEYS)}")
        if "eps" in body:
            _expect(isinstance(body["eps"], (int, float)) and 0 < body["eps"] < 1,
                    f"geometry {name}: eps must lie in (0, 1)")
    seed = doc.get("seed", 0)
    _expect(isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0, "seed must be a non-negative integer")
    return Config(dict(engine), dict(suites), dict(geometries), seed)


def load_config(path) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration {path} is not valid JSON: {exc}") from None
    return parse_config(doc)
