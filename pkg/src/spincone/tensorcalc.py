"""Finite-difference oracle and classical tensor calculus on coordinate charts.

Index conventions are fixed once, in ``docs/CONVENTIONS.md``:

* ``christoffel(...)[k, i, j] = Gamma^k_{ij}``, ``nabla_{d_i} d_j = Gamma^k_{ij} d_k``.
* ``riemann(...)[l, k, i, j] = R^l_{kij}`` with
  ``R(d_i, d_j) d_k = R^l_{kij} d_l`` and
  ``R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]``.
* ``ricci(...)[j, k] = sum_i R^i_{kij}``; the unit n-sphere has
  ``Ric = (n - 1) g`` and scalar curvature ``n (n - 1)``.

Fields are plain callables ``x -> ndarray``; when they carry a ``chart``
attribute, every stencil is checked against the chart domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PositiveDefinitenessError

SCHEMES = ("central_2nd_order", "central_4th_order", "richardson")
_DEFAULT_STEPS = {"central_2nd_order": 1e-4, "central_4th_order": 5e-3, "richardson": 1e-2}


@dataclass(frozen=True)
class DiffEngine:
    """Central-difference scheme with an optional per-axis step scaling.

    ``richardson`` combines central differences with steps ``h`` and ``h/2``
    into a fourth-order estimate.  Second and higher derivatives are always
    nested first differences of the same scheme.
    """

    scheme: str = "richardson"
    step: float | None = None
    axis_scale: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.step is None:
            object.__setattr__(self, "step", _DEFAULT_STEPS[self.scheme])
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.axis_scale is not None and any(s <= 0 for s in self.axis_scale):
            raise ValueError("axis_scale entries must be positive")

    def h(self, axis: int) -> float:
        if self.axis_scale is None:
            return self.step
        return self.step * self.axis_scale[axis]

    def reach(self, axis: int) -> float:
        """Largest stencil offset along ``axis``."""
        return (2.0 if self.scheme == "central_4th_order" else 1.0) * self.h(axis)

    def with_step(self, step: float) -> "DiffEngine":
        return DiffEngine(self.scheme, step, self.axis_scale)


DEFAULT_ENGINE = DiffEngine()


def _check_stencil(field, x, axis, engine):
    chart = getattr(field, "chart", None)
    if chart is None:
        return
    lo, hi = chart.lower[axis], chart.upper[axis]
    dist = min(x[axis] - lo, hi - x[axis])
    if not dist > 2.0 * engine.reach(axis):
        raise DomainError(
            f"stencil of reach {engine.reach(axis):g} along axis {axis} at {x[axis]:.6g} "
            f"is too close to the boundary of ({lo:g}, {hi:g}) in chart {chart.label!r}"
        )


def _central(field, x, axis, h):
    xp = x.copy()
    xm = x.copy()
    xp[axis] += h
    xm[axis] -= h
    return (np.asarray(field(xp)) - np.asarray(field(xm))) / (2.0 * h)


def partial_derivative(field, x, axis: int, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """Estimate ``d field / d x^axis`` at ``x``."""
    x = np.asarray(x, dtype=float)
    _check_stencil(field, x, axis, engine)
    h = engine.h(axis)
    if engine.scheme == "central_2nd_order":
        return _central(field, x, axis, h)
    if engine.scheme == "central_4th_order":
        return (4.0 * _central(field, x, axis, h) - _central(field, x, axis, 2.0 * h)) / 3.0
    return (4.0 * _central(field, x, axis, 0.5 * h) - _central(field, x, axis, h)) / 3.0


def gradient(field, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """All partial derivatives; the derivative axis comes first."""
    x = np.asarray(x, dtype=float)
    return np.stack([partial_derivative(field, x, a, engine) for a in range(x.size)])


def directional_derivative(field, x, v, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    return np.tensordot(np.asarray(v, dtype=float), gradient(field, x, engine), axes=1)


class _Bound:
    """Callable carrying the chart of the field it was derived from."""

    def __init__(self, fn, chart):
        self.fn = fn
        self.chart = chart

    def __call__(self, x):
        return self.fn(x)


def derived(fn, like):
    """Attach the chart of ``like`` to a derived callable."""
    return _Bound(fn, getattr(like, "chart", None))


def metric_inverse(gx) -> np.ndarray:
    try:
        np.linalg.cholesky(gx)
    except np.linalg.LinAlgError:
        raise PositiveDefinitenessError("metric is not positive definite") from None
    return np.linalg.inv(gx)


def christoffel(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[k, i, j]``, exactly symmetric in ``i, j``."""
    x = np.asarray(x, dtype=float)
    ginv = metric_inverse(np.asarray(g(x)))
    dg = gradient(g, x, engine)
    dg = 0.5 * (dg + dg.transpose(0, 2, 1))
    # dg[m, a, b] = d_m g_ab ; lower[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    lower = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    gam = 0.5 * np.einsum("kl,ijl->kij", ginv, lower)
    return 0.5 * (gam + gam.transpose(0, 2, 1))


@dataclass(frozen=True)
class CurvatureAt:
    point: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float


def curvature(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> CurvatureAt:
    """Christoffel symbols, Riemann, Ricci and scalar curvature at ``x``."""
    x = np.asarray(x, dtype=float)
    gam = christoffel(g, x, engine)
    dgam = gradient(derived(lambda y: christoffel(g, y, engine), g), x, engine)
    R = (
        np.einsum("iljk->lkij", dgam)
        - np.einsum("jlik->lkij", dgam)
        + np.einsum("lim,mjk->lkij", gam, gam)
        - np.einsum("ljm,mik->lkij", gam, gam)
    )
    ric = np.einsum("ikij->jk", R)
    ric = 0.5 * (ric + ric.T)
    ginv = np.linalg.inv(np.asarray(g(x)))
    return CurvatureAt(x, gam, R, ric, float(np.einsum("jk,jk->", ginv, ric)))


def riemann(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    return curvature(g, x, engine).riemann


def ricci(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    return curvature(g, x, engine).ricci


def scalar_curvature(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> float:
    return curvature(g, x, engine).scalar


def lowered_riemann(g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """``R_{lkij} = g_{lm} R^m_{kij}``: skew in (l, k) and (i, j), pair symmetric."""
    return np.einsum("lm,mkij->lkij", np.asarray(g(np.asarray(x, float))), riemann(g, x, engine))


def covariant_derivative_vector(V, g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """``out[i, k] = (nabla_{d_i} V)^k`` for a vector field ``V`` in coordinates."""
    x = np.asarray(x, dtype=float)
    dV = gradient(V, x, engine)
    return dV + np.einsum("kim,m->ik", christoffel(g, x, engine), np.asarray(V(x)))


def lie_bracket(X, Y, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """Coordinates of ``[X, Y] = X(Y) - Y(X)``."""
    x = np.asarray(x, dtype=float)
    return np.asarray(X(x)) @ gradient(Y, x, engine) - np.asarray(Y(x)) @ gradient(X, x, engine)


def covariant_derivative_symtensor(T, g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """``out[k, i, j] = (nabla_k T)_{ij}``."""
    x = np.asarray(x, dtype=float)
    Tx = np.asarray(T(x))
    gam = christoffel(g, x, engine)
    dT = gradient(T, x, engine)
    return dT - np.einsum("lki,lj->kij", gam, Tx) - np.einsum("lkj,il->kij", gam, Tx)


def divergence_symtensor(T, g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """``(div T)_j = g^{ik} (nabla_i T)_{kj}``."""
    x = np.asarray(x, dtype=float)
    ginv = np.linalg.inv(np.asarray(g(x)))
    return np.einsum("ik,ikj->j", ginv, covariant_derivative_symtensor(T, g, x, engine))


def codazzi_defect(T, g, x, engine: DiffEngine = DEFAULT_ENGINE) -> np.ndarray:
    """``D[k, i, j] = (nabla_i T)_{jk} - (nabla_j T)_{ik}``; zero iff Codazzi."""
    nT = covariant_derivative_symtensor(T, g, x, engine)
    # nT[i, j, k] = (nabla_i T)_{jk}
    return np.einsum("ijk->kij", nT) - np.einsum("jik->kij", nT)


def zero_tolerance(operand, floor: float = 1e-6, rel: float = 1e-6) -> float:
    """Tolerance used by every "approximately zero" check."""
    norm = float(np.max(np.abs(operand))) if np.size(operand) else 0.0
    return max(floor, rel * norm)


def is_approx_zero(value, reference=None, floor: float = 1e-6, rel: float = 1e-6) -> bool:
    ref = value if reference is None else reference
    return float(np.max(np.abs(value))) <= zero_tolerance(ref, floor, rel)
