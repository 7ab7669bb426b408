"""Generalized warped products ``(M x I, g + f(t) h + dt^2)``.

The ambient metric lives on the chart ``base x I`` with coordinates
``(x, t)``; ``t`` is always the last axis.  Every closed-form record has an
``*_oracle`` companion computing the same array from the ambient metric
with :mod:`spincone.tensorcalc`, and :func:`deviation` compares the two.

Horizontal lifts of base coordinate fields are the ambient fields
``(d_i, 0)``, so record arrays carry ambient components in their last axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import tensorcalc as tc
from .charts import Chart, MetricField, SymTensorField, orthonormal_frame
from .errors import PositiveDefinitenessError, PreconditionError

SPD_MARGIN = 1e-3
DEFAULT_EPS = 0.2


@dataclass(frozen=True, eq=False)
class WarpFunction:
    """Warp ``f`` with ``f(1) = 0`` and its first two derivatives."""

    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Callable[[float], float]
    tag: str = "custom"

    def __post_init__(self):
        if abs(self.f(1.0)) > 1e-12:
            raise ValueError(f"warp must vanish at t = 1, got f(1) = {self.f(1.0):g}")
        for t in (0.97, 1.0, 1.03):
            for fn, dfn, name in ((self.f, self.df, "f'"), (self.df, self.d2f, "f''")):
                num = (fn(t + 1e-5) - fn(t - 1e-5)) / 2e-5
                if abs(num - dfn(t)) > 1e-6 * max(1.0, abs(num)):
                    raise ValueError(f"{name} is inconsistent with its antiderivative at t = {t}")

    @classmethod
    def cone(cls) -> "WarpFunction":
        return cls(lambda t: t * t - 1.0, lambda t: 2.0 * t, lambda t: 2.0, "cone")

    @classmethod
    def classic(cls, q, dq, d2q) -> "WarpFunction":
        """``f = q^2 - 1`` for a positive ``q`` with ``q(1) = 1``."""
        return cls(
            lambda t: q(t) ** 2 - 1.0,
            lambda t: 2.0 * q(t) * dq(t),
            lambda t: 2.0 * (q(t) * d2q(t) + dq(t) ** 2),
            "classic",
        )

    @classmethod
    def custom(cls, f, df, d2f) -> "WarpFunction":
        return cls(f, df, d2f, "custom")


@dataclass(frozen=True, eq=False)
class WarpedGeometry:
    chart: Chart
    metric: MetricField
    h: SymTensorField
    warp: WarpFunction
    eps: float
    ambient_chart: Chart
    ambient: MetricField
    engine: tc.DiffEngine = field(default=tc.DEFAULT_ENGINE)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def g_t(self, t: float) -> MetricField:
        """Base metric ``g + f(t) h`` at frozen ``t``."""
        ft = self.warp.f(t)
        return MetricField(self.chart, lambda x: self.metric(x) + ft * self.h(x))

    def point(self, x, t) -> np.ndarray:
        return np.append(np.asarray(x, dtype=float), float(t))

    def sample(self, count: int, rng: np.random.Generator, t_min_offset: float = 0.0):
        """``count`` ambient points ``(x, t)``; optionally keep ``|t - 1|`` away from zero."""
        pts = self.ambient_chart.sample(count, rng)
        if t_min_offset > 0:
            lo, hi = pts[:, -1].min(), pts[:, -1].max()
            span = max(hi - 1.0, 1.0 - lo)
            side = np.where(rng.random(count) < 0.5, -1.0, 1.0)
            pts[:, -1] = 1.0 + side * rng.uniform(t_min_offset, span, size=count)
        return pts


def make_warped(chart: Chart, metric: MetricField, h, warp: WarpFunction | None = None,
                eps: float = DEFAULT_EPS, margin: float = SPD_MARGIN,
                engine: tc.DiffEngine = tc.DEFAULT_ENGINE, grid_points: int = 24,
                grid_times: int = 17) -> WarpedGeometry:
    """Build and certify a warped product.

    ``g_t`` must have minimum eigenvalue at least ``margin`` on a grid of
    base points (the chart center plus seeded random points) times
    ``grid_times`` values of ``t`` spanning ``[1 - eps, 1 + eps]``.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    warp = WarpFunction.cone() if warp is None else warp
    if not isinstance(h, SymTensorField):
        h = SymTensorField(chart, h)
    pts = np.vstack([chart.center, chart.sample(grid_points, np.random.default_rng(0), 0.0, 0.0)])
    worst = (np.inf, None, None)
    for x in pts:
        gx, hx = metric(x), h(x)
        for t in np.linspace(1.0 - eps, 1.0 + eps, grid_times):
            lam = np.linalg.eigvalsh(gx + warp.f(t) * hx).min()
            if lam < worst[0]:
                worst = (lam, x, t)
    if worst[0] < margin:
        lam, x, t = worst
        raise PositiveDefinitenessError(
            f"g_t fails SPD certification: min eigenvalue {lam:.4g} < {margin:g} at x={x}, t={t:.4g}"
        )
    n = chart.dim
    amb_chart = Chart(n + 1, chart.lower + (1.0 - eps,), chart.upper + (1.0 + eps,),
                      f"{chart.label}xI")

    def amb(p):
        G = np.zeros((n + 1, n + 1))
        G[:n, :n] = metric(p[:n]) + warp.f(p[n]) * h(p[:n])
        G[n, n] = 1.0
        return G

    return WarpedGeometry(chart, metric, h, warp, eps, amb_chart, MetricField(amb_chart, amb), engine)


def ambient_metric(wg: WarpedGeometry) -> MetricField:
    return wg.ambient


def endo_G_t(wg: WarpedGeometry, x, t) -> np.ndarray:
    """``G_t = Id + f(t) H`` with ``g_t(X, Y) = g(G_t X, Y)``."""
    x = np.asarray(x, dtype=float)
    return np.eye(wg.dim) + wg.warp.f(t) * np.linalg.solve(wg.metric(x), wg.h(x))


def endo_H_t(wg: WarpedGeometry, x, t) -> np.ndarray:
    """``H_t`` with ``g_t(H_t X, Y) = h(X, Y)``."""
    x = np.asarray(x, dtype=float)
    return np.linalg.solve(wg.g_t(t)(x), wg.h(x))


def _inv_sqrt_spd(M):
    w, v = np.linalg.eigh(0.5 * (M + M.T))
    return (v / np.sqrt(w)) @ v.T


def adapted_frame(wg: WarpedGeometry, x, t) -> np.ndarray:
    """Columns ``(e_1^t, ..., e_n^t, d_t)`` with ``e_i^t = G_t^{-1/2} e_i``.

    In the orthonormal base frame ``E`` the endomorphism ``G_t`` is the
    symmetric matrix ``E^T g_t E``, whose principal inverse root is taken.
    """
    x = np.asarray(x, dtype=float)
    n = wg.dim
    E = orthonormal_frame(wg.metric, x)
    Ghat = E.T @ wg.g_t(t)(x) @ E
    F = np.zeros((n + 1, n + 1))
    F[:n, :n] = E @ _inv_sqrt_spd(Ghat)
    F[n, n] = 1.0
    return F


# ------------------------------------------------------------ base data

@dataclass(frozen=True)
class _Frozen:
    x: np.ndarray
    t: float
    f: float
    df: float
    d2f: float
    h: np.ndarray
    Ht: np.ndarray       # Ht[k, j]: H_t(d_j)
    gam_t: np.ndarray    # Levi-Civita symbols of g_t
    nab_Ht: np.ndarray   # nab_Ht[i, j, :] = nabla^t_{d_i}(H_t(d_j))
    A: np.ndarray        # A[:, i, j] = A_t(d_i, d_j)
    dh: np.ndarray       # dh[k, i, j] = d_k h_ij


def _frozen(wg: WarpedGeometry, x, t) -> _Frozen:
    x = wg.chart.require(x)
    eng = wg.engine
    gt = wg.g_t(t)
    gam_t = tc.christoffel(gt, x, eng)
    Ht_field = tc.derived(lambda y: np.linalg.solve(gt(y), wg.h(y)), wg.h)
    Ht = Ht_field(x)
    dHt = tc.gradient(Ht_field, x, eng)
    nab_Ht = np.einsum("ikj->ijk", dHt) + np.einsum("kim,mj->ijk", gam_t, Ht)
    dh = tc.gradient(wg.h, x, eng)
    dh = 0.5 * (dh + dh.transpose(0, 2, 1))
    koszul = np.einsum("ijl->lij", dh) + np.einsum("jil->lij", dh) - dh
    A = np.linalg.solve(gt(x), koszul.reshape(wg.dim, -1)).reshape(koszul.shape)
    return _Frozen(x, float(t), wg.warp.f(t), wg.warp.df(t), wg.warp.d2f(t), wg.h(x),
                   Ht, gam_t, nab_Ht, A, dh)


def _lift(v, normal=0.0):
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (v.shape[-1] + 1,))
    out[..., :-1] = v
    out[..., -1] = normal
    return out


def deviation(closed: dict, oracle: dict) -> dict:
    """Max componentwise deviation per record key."""
    return {k: float(np.abs(np.asarray(closed[k]) - np.asarray(oracle[k])).max()) for k in closed}


def closed_form_tolerance(values: dict, parallel: bool) -> float:
    scale = max(float(np.abs(np.asarray(v)).max()) for v in values.values())
    base = 1e-5 if parallel else 1e-4
    return max(base, base * scale)


# ----------------------------------------------------------- connection

def connection_closed_form(wg: WarpedGeometry, x, t) -> dict:
    """Levi-Civita connection of the warped product on lifted coordinate fields.

    Keys: ``nabla_t_t``, ``nabla_X_t[i]``, ``nabla_t_X[i]``, ``nabla_X_Y[i, j]``.
    """
    fz = _frozen(wg, x, t)
    n = wg.dim
    half = 0.5 * fz.df
    gam = fz.gam_t
    return {
        "nabla_t_t": np.zeros(n + 1),
        "nabla_X_t": _lift(half * fz.Ht.T),
        "nabla_t_X": _lift(half * fz.Ht.T),
        "nabla_X_Y": _lift(np.einsum("kij->ijk", gam), -half * fz.h),
    }


def connection_oracle(wg: WarpedGeometry, x, t) -> dict:
    n = wg.dim
    gam = tc.christoffel(wg.ambient, wg.point(x, t), wg.engine)
    return {
        "nabla_t_t": gam[:, n, n],
        "nabla_X_t": gam[:, :n, n].T,
        "nabla_t_X": gam[:, n, :n].T,
        "nabla_X_Y": np.einsum("kij->ijk", gam[:, :n, :n]),
    }


def second_cov_closed_form(wg: WarpedGeometry, x, t) -> dict:
    """Second covariant derivatives of lifted coordinate fields.

    ``S[a, b, c] = nabla_a (nabla_b c)``; keys name the operands, for example
    ``nabla_t_nabla_X_Y[i, j]``.
    """
    fz = _frozen(wg, x, t)
    n = wg.dim
    eng = wg.engine
    half, quart, half2 = 0.5 * fz.df, 0.25 * fz.df ** 2, 0.5 * fz.d2f
    Ht, h, gam = fz.Ht, fz.h, fz.gam_t
    gt = wg.g_t(t)
    dgam = tc.gradient(tc.derived(lambda y: tc.christoffel(gt, y, eng), wg.h), fz.x, eng)
    nn_gam = np.einsum("iljk->ijkl", dgam) + np.einsum("lim,mjk->ijkl", gam, gam)
    HtHt = Ht @ Ht
    hHt = h @ Ht
    tangent39 = nn_gam - quart * np.einsum("jk,li->ijkl", h, Ht)
    normal39 = -half * (np.einsum("im,mjk->ijk", h, gam) + fz.dh)
    return {
        "nabla_X_nabla_t_t": np.zeros((n, n + 1)),
        "nabla_t_nabla_t_t": np.zeros(n + 1),
        "nabla_t_nabla_X_t": _lift((half2 * Ht - quart * HtHt).T),
        "nabla_t_nabla_t_X": _lift((half2 * Ht - quart * HtHt).T),
        "nabla_X_nabla_t_Y": _lift(half * fz.nab_Ht, -quart * hHt),
        "nabla_X_nabla_Y_t": _lift(half * fz.nab_Ht, -quart * hHt),
        "nabla_t_nabla_X_Y": _lift(
            np.einsum("kij->ijk", half * fz.A - half * np.einsum("km,mij->kij", Ht, gam)),
            -half2 * h,
        ),
        "nabla_X_nabla_Y_Z": _lift(tangent39, normal39),
    }


def second_cov_oracle(wg: WarpedGeometry, x, t) -> dict:
    n = wg.dim
    eng = wg.engine
    p = wg.point(x, t)
    amb = wg.ambient
    gam = tc.christoffel(amb, p, eng)
    dgam = tc.gradient(tc.derived(lambda q: tc.christoffel(amb, q, eng), amb), p, eng)
    S = np.einsum("akbc->abck", dgam) + np.einsum("kam,mbc->abck", gam, gam)
    X = slice(0, n)
    return {
        "nabla_X_nabla_t_t": S[X, n, n],
        "nabla_t_nabla_t_t": S[n, n, n],
        "nabla_t_nabla_X_t": S[n, X, n],
        "nabla_t_nabla_t_X": S[n, n, X],
        "nabla_X_nabla_t_Y": S[X, n, X],
        "nabla_X_nabla_Y_t": S[X, X, n],
        "nabla_t_nabla_X_Y": S[n, X, X],
        "nabla_X_nabla_Y_Z": S[X, X, X],
    }


def a_t(wg: WarpedGeometry, X, Y, x, t) -> np.ndarray:
    """``A_t(X, Y)``: ``g_t(A_t(X, Y), Z)`` is the full Koszul expression of ``h``.

    ``X`` and ``Y`` are constant coordinate vectors or vector-field callables;
    bracket terms are evaluated numerically.
    """
    x = wg.chart.require(x)
    eng = wg.engine
    Xf = _as_field(X, wg.h)
    Yf = _as_field(Y, wg.h)
    h = wg.h
    Xv, Yv = Xf(x), Yf(x)
    hx = h(x)
    hY = tc.derived(lambda y: h(y) @ Yf(y), h)
    hX = tc.derived(lambda y: h(y) @ Xf(y), h)
    hXY = tc.derived(lambda y: Xf(y) @ h(y) @ Yf(y), h)
    dY = tc.gradient(Yf, x, eng)   # dY[k, :] = d_k Y
    dX = tc.gradient(Xf, x, eng)
    rhs = (
        Xv @ tc.gradient(hY, x, eng)
        + Yv @ tc.gradient(hX, x, eng)
        - tc.gradient(hXY, x, eng)
        + np.einsum("a,ab,kb->k", Xv, hx, dY)       # -h(X, [Y, d_k]) with [Y, d_k] = -d_k Y
        + np.einsum("a,ab,kb->k", Yv, hx, dX)       # h(Y, [d_k, X]) with [d_k, X] = d_k X
        + hx @ tc.lie_bracket(Xf, Yf, x, eng)
    )
    return np.linalg.solve(wg.g_t(t)(x), rhs)


def _as_field(V, like):
    if callable(V):
        return tc.derived(lambda y: np.asarray(V(y), dtype=float), like)
    v = np.asarray(V, dtype=float)
    return tc.derived(lambda y: v, like)


def curvature_closed_form(wg: WarpedGeometry, x, t, base_nabla_h: bool = False) -> dict:
    """Ambient Riemann tensor on lifted coordinate fields.

    ``R_XY_Z[i, j, k] = R(d_i, d_j) d_k`` and so on.  The normal part of
    ``R_XY_Z`` uses ``nabla^t h``; ``base_nabla_h=True`` substitutes the base
    connection instead (equal when ``h`` is parallel).
    """
    fz = _frozen(wg, x, t)
    n = wg.dim
    eng = wg.engine
    half, quart, half2 = 0.5 * fz.df, 0.25 * fz.df ** 2, 0.5 * fz.d2f
    Ht, h, gam = fz.Ht, fz.h, fz.gam_t
    gt = wg.g_t(t)
    Rt = tc.riemann(gt, fz.x, eng)
    if base_nabla_h:
        nh = tc.covariant_derivative_symtensor(wg.h, wg.metric, fz.x, eng)
    else:
        nh = tc.covariant_derivative_symtensor(wg.h, gt, fz.x, eng)
    HtHt = Ht @ Ht
    nabHt = fz.nab_Ht
    R_Xt_Y_tan = half * (nabHt + np.einsum("km,mij->ijk", Ht, gam) - np.einsum("kij->ijk", fz.A))
    return {
        "R_tt_t": np.zeros(n + 1),
        "R_tt_X": np.zeros((n, n + 1)),
        "R_Xt_t": _lift((-half2 * Ht + quart * HtHt).T),
        "R_Xt_Y": _lift(R_Xt_Y_tan, half2 * h - quart * (h @ Ht)),
        "R_XY_t": _lift(half * (nabHt - nabHt.transpose(1, 0, 2)), 0.0),
        "R_XY_Z": _lift(
            np.einsum("lkij->ijkl", Rt) + quart * (np.einsum("ik,lj->ijkl", h, Ht)
                                                   - np.einsum("jk,li->ijkl", h, Ht)),
            half * (np.einsum("jik->ijk", nh) - nh),
        ),
    }


def curvature_oracle(wg: WarpedGeometry, x, t) -> dict:
    n = wg.dim
    R = tc.riemann(wg.ambient, wg.point(x, t), wg.engine)
    X = slice(0, n)
    return {
        "R_tt_t": R[:, n, n, n],
        "R_tt_X": np.einsum("lk->kl", R[:, X, n, n]),
        "R_Xt_t": np.einsum("li->il", R[:, n, X, n]),
        "R_Xt_Y": np.einsum("lji->ijl", R[:, X, X, n]),
        "R_XY_t": np.einsum("lij->ijl", R[:, n, X, X]),
        "R_XY_Z": np.einsum("lkij->ijkl", R[:, X, X, X]),
    }


# ------------------------------------------------------- connection shift

def b_t(wg: WarpedGeometry, X, Y, x, t) -> np.ndarray:
    """``B^t(X, Y)`` from ``g_t(B^t(X, Y), Z) = (nabla_X h)(Y, Z) + (nabla_Y h)(Z, X) - (nabla_Z h)(X, Y)``."""
    x = wg.chart.require(x)
    B = _b_tensor(wg, x, t)
    return np.einsum("kij,i,j->k", B, np.asarray(X, float), np.asarray(Y, float))


def _b_tensor(wg, x, t):
    nh = tc.covariant_derivative_symtensor(wg.h, wg.metric, x, wg.engine)  # nh[k, i, j]
    # rhs[l, i, j] = (nabla_i h)(j, l) + (nabla_j h)(l, i) - (nabla_l h)(i, j)
    rhs = np.einsum("ijl->lij", nh) + np.einsum("jli->lij", nh) - nh
    n = wg.dim
    return np.linalg.solve(wg.g_t(t)(x), rhs.reshape(n, -1)).reshape(n, n, n)


SHIFT_COEFFICIENTS = (1.0, 0.5)


def connection_shift_residuals(wg: WarpedGeometry, x, t) -> dict:
    """``max |Gamma^t - Gamma - c f(t) B^t|`` for each candidate ``c``."""
    x = wg.chart.require(x)
    eng = wg.engine
    diff = tc.christoffel(wg.g_t(t), x, eng) - tc.christoffel(wg.metric, x, eng)
    B = _b_tensor(wg, x, t)
    ft = wg.warp.f(t)
    return {c: float(np.abs(diff - c * ft * B).max()) for c in SHIFT_COEFFICIENTS}


@dataclass(frozen=True)
class ShiftResult:
    residuals: dict
    matching: tuple
    shift_norm: float

    @property
    def coefficient(self) -> float | None:
        return self.matching[0] if len(self.matching) == 1 else None


def connection_shift_check(wg: WarpedGeometry, points, tol: float = 1e-6) -> ShiftResult:
    """Decide which coefficient in ``nabla^t = nabla + c f(t) B^t`` the oracle supports.

    ``points`` is an array of ambient points ``(x, t)``; residuals are maxima
    over them.  ``shift_norm`` is the largest ``|Gamma^t - Gamma|`` seen, so a
    caller can tell a vacuous comparison from a decisive one.
    """
    worst = {c: 0.0 for c in SHIFT_COEFFICIENTS}
    shift = 0.0
    for p in np.atleast_2d(points):
        x, t = p[:-1], p[-1]
        for c, r in connection_shift_residuals(wg, x, t).items():
            worst[c] = max(worst[c], r)
        diff = tc.christoffel(wg.g_t(t), x, wg.engine) - tc.christoffel(wg.metric, x, wg.engine)
        shift = max(shift, float(np.abs(diff).max()))
    matching = tuple(c for c in SHIFT_COEFFICIENTS if worst[c] < tol)
    return ShiftResult(worst, matching, shift)


# --------------------------------------------------------- cone at t = 1

def _require_cone(wg):
    if wg.warp.tag != "cone":
        raise ValueError("this operation needs the cone warp f(t) = t^2 - 1")


def cone_extrinsic_forms(wg: WarpedGeometry, x) -> dict:
    """Both sides of the extrinsic curvature displays at ``t = 1``.

    Returns ``{key: (oracle, closed)}`` for ``radial[i, j]``,
    ``mixed[i, j, k]``, ``gauss[i, j, k, l]`` and
    ``second_fundamental_form[i, j]`` of ``M x {1}`` for the normal ``d_t``.
    """
    _require_cone(wg)
    x = wg.chart.require(x)
    n = wg.dim
    eng = wg.engine
    p = wg.point(x, 1.0)
    G = wg.ambient(p)
    R = tc.riemann(wg.ambient, p, eng)
    Rl = np.einsum("mkij,ml->lkij", R, G)  # Rl[l, k, i, j] = g(R(d_i, d_j) d_k, d_l)
    gam = tc.christoffel(wg.ambient, p, eng)
    X = slice(0, n)
    g, h = wg.metric(x), wg.h(x)
    nh = tc.covariant_derivative_symtensor(wg.h, wg.metric, x, eng)
    Rb = tc.lowered_riemann(wg.metric, x, eng)
    return {
        "radial": (np.einsum("ji->ij", Rl[X, n, X, n]), h @ np.linalg.solve(g, h) - h),
        "mixed": (np.einsum("kij->ijk", Rl[X, n, X, X]), nh - nh.transpose(1, 0, 2)),
        "gauss": (
            np.einsum("lkij->ijkl", Rl[X, X, X, X]),
            np.einsum("lkij->ijkl", Rb) + np.einsum("ik,jl->ijkl", h, h) - np.einsum("jk,il->ijkl", h, h),
        ),
        "second_fundamental_form": (-gam[n, X, X], h),
    }


# ------------------------------------------------------------- Ricci

def ricci_condition_residual(g, h, x, engine: tc.DiffEngine = tc.DEFAULT_ENGINE) -> np.ndarray:
    """``Ric - tr(H) H + H^2`` as an endomorphism, ``H = g^-1 h``."""
    x = np.asarray(x, dtype=float)
    gx = np.asarray(g(x))
    H = np.linalg.solve(gx, np.asarray(h(x)))
    Ric = np.linalg.solve(gx, tc.ricci(g, x, engine))
    return Ric - np.trace(H) * H + H @ H


def _condition_norm(M) -> float:
    return float(np.linalg.norm(M, 2))


def check_ricci_hypotheses(wg: WarpedGeometry, x, parallel_tol: float = 1e-6,
                           ricci_tol: float = 1e-5) -> dict:
    """Residuals of the hypotheses under which the cone Ricci closed form holds."""
    x = wg.chart.require(x)
    nh = tc.covariant_derivative_symtensor(wg.h, wg.metric, x, wg.engine)
    cond = ricci_condition_residual(wg.metric, wg.h, x, wg.engine)
    res = {
        "cone_warp": wg.warp.tag == "cone",
        "nabla_h": float(np.abs(nh).max()),
        "ricci_condition": _condition_norm(cond),
    }
    res["ok"] = (res["cone_warp"] and res["nabla_h"] <= tc.zero_tolerance(wg.h(x), parallel_tol, parallel_tol)
                 and res["ricci_condition"] <= ricci_tol)
    return res


READINGS = ("i", "1")


def ricci_cone_closed_form(wg: WarpedGeometry, x, t, reading: str = "i", check: bool = True) -> np.ndarray:
    """Ricci tensor of the generalized cone in the adapted frame.

    ``reading`` selects the inner index of the ``Ric(d_t, d_t)`` sum:
    ``"i"`` sums ``h(e_i^t, H_t e_i^t)``, ``"1"`` sums ``h(e_i^t, H_t e_1^t)``.
    Raises :class:`PreconditionError` when ``h`` is not parallel or the base
    Ricci condition fails (``check=False`` skips this).
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    x = wg.chart.require(x)
    if check:
        hyp = check_ricci_hypotheses(wg, x)
        if not hyp["ok"]:
            raise PreconditionError(
                "closed-form cone Ricci hypotheses not met: "
                f"cone warp {hyp['cone_warp']}, |nabla h| = {hyp['nabla_h']:.3g}, "
                f"Ricci condition residual = {hyp['ricci_condition']:.3g}",
                hyp["ricci_condition"],
            )
    n = wg.dim
    g, h = wg.metric(x), wg.h(x)
    H = np.linalg.solve(g, h)
    Ht = endo_H_t(wg, x, t)
    et = adapted_frame(wg, x, t)[:n, :n]
    hf = et.T @ h @ et                       # h(e_a^t, e_b^t)
    trace_h = np.trace(hf)
    hHt = et.T @ h @ Ht @ et                 # h(e_a^t, H_t e_b^t)
    out = np.zeros((n + 1, n + 1))
    if reading == "i":
        out[n, n] = t * t * np.trace(hHt) - trace_h
    else:
        out[n, n] = t * t * hHt[:, 0].sum() - trace_h
    hH = et.T @ H.T @ h @ et                 # h(H e_a^t, e_b^t)
    htH = et.T @ Ht.T @ h @ et               # h(H_t e_a^t, e_b^t)
    out[:n, :n] = np.trace(H) * hf - hH - t * t * trace_h * hf + t * t * htH
    return 0.5 * (out + out.T)


def ricci_cone_oracle(wg: WarpedGeometry, x, t) -> np.ndarray:
    F = adapted_frame(wg, x, t)
    return F.T @ tc.ricci(wg.ambient, wg.point(x, t), wg.engine) @ F


# ---------------------------------------------------------- projector

def projector_cone(chart: Chart, metric: MetricField, k: int, parallel_axes=None,
                   eps: float = DEFAULT_EPS, engine: tc.DiffEngine = tc.DEFAULT_ENGINE,
                   tol: float = 1e-10) -> WarpedGeometry:
    """Generalized cone with ``H`` the projector onto the complement of a parallel distribution.

    The distribution is spanned by the coordinate axes ``parallel_axes``
    (default: the first ``k``).  The metric must split orthogonally between
    those axes and the rest, with a constant block on the parallel axes; then
    ``h`` is the complementary metric block and ``H = g^-1 h`` is the
    projector.
    """
    n = chart.dim
    axes = tuple(range(k)) if parallel_axes is None else tuple(int(a) for a in parallel_axes)
    if len(axes) != k or len(set(axes)) != k or any(not 0 <= a < n for a in axes):
        raise ValueError(f"need {k} distinct axes in [0, {n}), got {axes}")
    par = np.zeros(n, dtype=bool)
    par[list(axes)] = True
    pts = np.vstack([chart.center, chart.sample(8, np.random.default_rng(1))])
    ref = metric(pts[0])[np.ix_(par, par)]
    for x in pts:
        gx = metric(x)
        if np.abs(gx[np.ix_(par, ~par)]).max(initial=0.0) > tol:
            raise ValueError("metric does not split orthogonally along the parallel axes")
        if np.abs(gx[np.ix_(par, par)] - ref).max(initial=0.0) > tol:
            raise ValueError("metric block on the parallel axes is not constant")
        dg = tc.gradient(metric, x, engine)  # dg[m] = d_m g
        if np.abs(dg[:, par][:, :, par]).max(initial=0.0) > 1e-8:
            raise ValueError("metric block on the parallel axes is not constant")
        if np.abs(dg[par]).max(initial=0.0) > 1e-8:
            raise ValueError("metric depends on the parallel coordinates, so the splitting is not a product")
    mask = np.outer(~par, ~par)

    def h(x):
        return np.where(mask, metric(x), 0.0)

    return make_warped(chart, metric, SymTensorField(chart, h), WarpFunction.cone(), eps, engine=engine)


# ------------------------------------------------------------- brackets

def lift_bracket_check(wg: WarpedGeometry, X, Y, x, t) -> float:
    """Residual of ``[X~, Y~] = [X, Y]~`` and ``[X~, d_t] = 0`` for base fields ``X, Y``."""
    eng = wg.engine
    n = wg.dim
    x = wg.chart.require(x)
    Xb = _as_field(X, wg.h)
    Yb = _as_field(Y, wg.h)
    Xl = tc.derived(lambda p: _lift(Xb(p[:n])), wg.ambient)
    Yl = tc.derived(lambda p: _lift(Yb(p[:n])), wg.ambient)
    e_t = np.zeros(n + 1)
    e_t[n] = 1.0
    Tl = tc.derived(lambda p: e_t, wg.ambient)
    p = wg.point(x, t)
    lifted = tc.lie_bracket(Xl, Yl, p, eng)
    base = _lift(tc.lie_bracket(Xb, Yb, x, eng))
    r1 = np.abs(lifted - base).max()
    r2 = max(np.abs(tc.lie_bracket(Xl, Tl, p, eng)).max(), np.abs(tc.lie_bracket(Yl, Tl, p, eng)).max())
    return float(max(r1, r2))
