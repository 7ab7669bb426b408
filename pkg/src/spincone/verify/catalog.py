"""Named geometries used by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..charts import Immersion, SymTensorField, builtin_chart
from ..errors import ConfigError
from ..tensorcalc import DiffEngine
from ..warped import DEFAULT_EPS, WarpedGeometry, WarpFunction, make_warped, projector_cone


@dataclass(frozen=True, eq=False)
class Geometry:
    """A catalog entry: an immersed hypersurface and/or a warped product."""

    name: str
    kind: str                      # "hypersurface", "warped" or "algebra"
    immersion: Immersion | None = None
    warped: WarpedGeometry | None = None
    parallel_h: bool | None = None
    unit_sphere_dim: int | None = None
    dim: int | None = None


def _hypersurface(chart_name, params):
    def build(engine, overrides):
        _, _, imm = builtin_chart(chart_name, params, engine)
        sphere = None
        if chart_name.startswith("sphere") and float(params[0]) == 1.0:
            sphere = int(params[1]) if len(params) > 1 else 2
        return dict(kind="hypersurface", immersion=imm, unit_sphere_dim=sphere)
    return build


def _torus_h(x):
    return (1.0 + 0.5 * np.sin(x[0])) * np.eye(2)


def _torus_warp():
    return WarpFunction.custom(
        lambda t: np.sin(2.0 * (t - 1.0)) + (t - 1.0) ** 2,
        lambda t: 2.0 * np.cos(2.0 * (t - 1.0)) + 2.0 * (t - 1.0),
        lambda t: -4.0 * np.sin(2.0 * (t - 1.0)) + 2.0,
    )


def _warped(chart_name, params, h_kind, warp="cone", parallel=True, projector_k=None):
    def build(engine, overrides):
        eps = float(overrides.get("eps", DEFAULT_EPS))
        chart, g, imm = builtin_chart(chart_name, params, engine)
        if projector_k is not None:
            wg = projector_cone(chart, g, projector_k, eps=eps, engine=engine)
        else:
            if h_kind == "zero":
                n = chart.dim
                h = SymTensorField(chart, lambda x: np.zeros((n, n)))
            elif h_kind == "metric":
                h = g
            elif h_kind == "torus":
                h = SymTensorField(chart, _torus_h)
            elif h_kind == "x2dx1":
                h = SymTensorField(chart, lambda x: np.array([[x[1], 0.0], [0.0, 0.0]]))
            elif h_kind == "sphere_block":
                mask = np.outer([1, 1, 0], [1, 1, 0]).astype(bool)
                h = SymTensorField(chart, lambda x: np.where(mask, g(x), 0.0))
            else:
                raise AssertionError(h_kind)
            if warp == "cone":
                wf = WarpFunction.cone()
            elif warp == "classic":
                wf = WarpFunction.classic(lambda t: t, lambda t: 1.0, lambda t: 0.0)
            else:
                wf = _torus_warp()
            wg = make_warped(chart, g, h, wf, eps, engine=engine)
        return dict(kind="warped", warped=wg, immersion=imm, parallel_h=parallel)
    return build


def _algebra(n):
    def build(engine, overrides):
        return dict(kind="algebra", dim=n)
    return build


BUILDERS: dict[str, Callable] = {
    "sphere2": _hypersurface("sphere_polar", [1.0, 2]),
    "sphere3": _hypersurface("sphere_stereo", [1.0, 3]),
    "sphere4": _hypersurface("sphere_stereo", [1.0, 4]),
    "plane": _hypersurface("flat", [2]),
    "cylinder": _hypersurface("cylinder_product", [2, 1]),
    "product_h0": _warped("sphere_polar", [1.0, 2], "zero"),
    "sphere_cone": _warped("sphere_polar", [1.0, 2], "metric"),
    "sphere_classic": _warped("sphere_polar", [1.0, 2], "metric", warp="classic"),
    "sphere3_cone": _warped("sphere_stereo", [1.0, 3], "metric"),
    "sphere_r2_h_eq_g": _warped("sphere_polar", [2.0, 2], "metric"),
    "torus_nonparallel": _warped("torus", [2], "torus", warp="custom", parallel=False),
    "torus_nonparallel_cone": _warped("torus", [2], "torus", parallel=False),
    "flat_x2dx1": _warped("flat", [2], "x2dx1", parallel=False),
    "cylinder_cone": _warped("cylinder_product", [2, 1], "sphere_block"),
    "projector_cone": _warped("product", [1, 2], None, projector_k=1),
    **{f"dim{n}": _algebra(n) for n in range(1, 10)},
}

GEOMETRY_NAMES = tuple(sorted(BUILDERS))


class GeometryCache:
    """Builds each geometry at most once per run."""

    def __init__(self, engine: DiffEngine, overrides: dict | None = None):
        self.engine = engine
        self.overrides = overrides or {}
        self._cache: dict[str, Geometry] = {}

    def get(self, name: str) -> Geometry:
        if name not in BUILDERS:
            raise ConfigError(f"unknown geometry {name!r}")
        if name not in self._cache:
            self._cache[name] = Geometry(name=name, **BUILDERS[name](self.engine, self.overrides.get(name, {})))
        return self._cache[name]
