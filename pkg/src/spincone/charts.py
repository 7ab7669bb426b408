"""Coordinate charts, tensor fields on them, hypersurface immersions and the
catalog of built-in test geometries.

All ambient spaces are flat ``R^(n+1)``.  Normals of catalog immersions are
outward, and the second fundamental form is ``h_ij = -<d_i d_j F, nu>``, so
the unit sphere has ``h = g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ImmersionError, PositiveDefinitenessError
from .tensorcalc import DEFAULT_ENGINE, DiffEngine, derived, gradient

POLAR_BAND = 0.1


@dataclass(frozen=True)
class Chart:
    """Axis-aligned open box in ``R^dim``."""

    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be at least 1")
        if len(self.lower) != self.dim or len(self.upper) != self.dim:
            raise ValueError("bounds must have one entry per axis")
        if any(not lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"empty interval in chart {self.label!r}")

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x > self.lower) and np.all(x < self.upper))

    def require(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,) or not self.contains(x):
            raise DomainError(f"point {x} is not inside chart {self.label!r}")
        return x

    def sample(self, count: int, rng: np.random.Generator, margin: float = 0.1,
               min_margin: float = 0.08) -> np.ndarray:
        """Uniform points at distance ``max(margin * width, min_margin)`` from the boundary."""
        lo = np.array(self.lower)
        hi = np.array(self.upper)
        pad = np.maximum(margin * (hi - lo), min(min_margin, 0.25)) * np.ones(self.dim)
        pad = np.minimum(pad, 0.4 * (hi - lo))
        return rng.uniform(lo + pad, hi - pad, size=(count, self.dim))

    def product(self, other: "Chart", label: str = "") -> "Chart":
        return Chart(self.dim + other.dim, self.lower + other.lower, self.upper + other.upper,
                     label or f"{self.label}x{other.label}")


@dataclass(frozen=True, eq=False)
class Field:
    """A chart-local map ``x -> ndarray``."""

    chart: Chart
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


class SymTensorField(Field):
    """Symmetric 2-tensor in coordinates (a bilinear form)."""


class MetricField(SymTensorField):
    """Riemannian metric; positivity is checked by :meth:`check`."""

    def check(self, x, tol: float = 1e-12) -> np.ndarray:
        gx = self(x)
        if np.abs(gx - gx.T).max() > tol * max(1.0, np.abs(gx).max()):
            raise PositiveDefinitenessError(f"metric not symmetric at {x}")
        if np.linalg.eigvalsh(gx).min() <= 0:
            raise PositiveDefinitenessError(f"metric not positive definite at {x}")
        return gx


class EndoField(Field):
    """Endomorphism of the tangent space, ``E[i, j]`` maps ``d_j`` to ``E[i, j] d_i``."""

    @classmethod
    def raise_index(cls, T: SymTensorField, g: MetricField) -> "EndoField":
        """The endomorphism ``E`` with ``g(E X, Y) = T(X, Y)``."""
        return cls(T.chart, lambda x: np.linalg.solve(g(x), T(x)))


@dataclass(frozen=True, eq=False)
class Immersion:
    """``F: chart -> R^(dim+1)`` with a unit normal field ``nu``."""

    chart: Chart
    fn: Callable[[np.ndarray], np.ndarray]
    normal_fn: Callable[[np.ndarray], np.ndarray]
    engine: DiffEngine = field(default=DEFAULT_ENGINE)

    @property
    def ambient_dim(self) -> int:
        return self.chart.dim + 1

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def normal(self, x) -> np.ndarray:
        return np.asarray(self.normal_fn(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x) -> np.ndarray:
        """``J[:, i] = d_i F``."""
        return gradient(self, x, self.engine).T

    def check(self, x, tol: float = 1e-9) -> None:
        J = self.jacobian(x)
        nu = self.normal(x)
        if np.linalg.matrix_rank(J, tol=1e-8) < self.chart.dim:
            raise ImmersionError(f"differential is rank deficient at {x}")
        if abs(np.linalg.norm(nu) - 1.0) > tol:
            raise ImmersionError(f"normal is not unit at {x}")
        if np.abs(nu @ J).max() > tol:
            raise ImmersionError(f"normal is not orthogonal to the tangent space at {x}")


def orthonormal_frame(g, x) -> np.ndarray:
    """Gram-Schmidt of the coordinate basis in index order.

    Returns the upper-triangular ``E`` with positive diagonal and
    ``E.T @ g @ E = I``; its columns are the frame vectors.
    """
    gx = np.asarray(g(np.asarray(x, dtype=float)), dtype=float)
    try:
        L = np.linalg.cholesky(gx)
    except np.linalg.LinAlgError:
        raise PositiveDefinitenessError(f"metric not positive definite at {x}") from None
    return np.linalg.inv(L.T)


def frame_field(g) -> Callable:
    return derived(lambda y: orthonormal_frame(g, y), g)


def induced_metric(imm: Immersion) -> MetricField:
    """First fundamental form ``g_ij = <d_i F, d_j F>``."""

    def fn(x):
        J = imm.jacobian(x)
        gx = J.T @ J
        return 0.5 * (gx + gx.T)

    return MetricField(imm.chart, fn)


def second_fundamental_form(imm: Immersion) -> SymTensorField:
    """``h_ij = -<d_i d_j F, nu>`` as a bilinear form in coordinates."""
    jac = derived(imm.jacobian, imm)

    def fn(x):
        imm.check(x, tol=1e-7)
        hess = gradient(jac, x, imm.engine)  # hess[i, :, j] = d_i d_j F
        h = -np.einsum("iaj,a->ij", hess, imm.normal(x))
        return 0.5 * (h + h.T)

    return SymTensorField(imm.chart, fn)


# ---------------------------------------------------------------- catalog

def _sphere_polar_point(angles, radius):
    """Hyperspherical embedding; the last angle is the azimuth."""
    m = len(angles)
    out = np.empty(m + 1)
    s = 1.0
    for k in range(m - 1):
        out[k] = s * np.cos(angles[k])
        s *= np.sin(angles[k])
    out[m - 1] = s * np.cos(angles[m - 1])
    out[m] = s * np.sin(angles[m - 1])
    return radius * out


def _sphere_polar_metric(angles, radius):
    m = len(angles)
    diag = np.empty(m)
    s2 = 1.0
    for k in range(m):
        diag[k] = s2
        s2 *= np.sin(angles[k]) ** 2
    return radius ** 2 * np.diag(diag)


def _stereo_point(u, radius):
    q = u @ u
    return radius * np.concatenate([2.0 * u, [1.0 - q]]) / (1.0 + q)


def _orient(chart, F, nu, engine):
    """Reflect the first ambient axis if ``(e_1..e_n, -nu)`` is negatively oriented."""
    probe = Immersion(chart, F, nu, engine)
    x = chart.center
    J = probe.jacobian(x)
    E = orthonormal_frame(lambda y: J.T @ J, x)
    if np.linalg.det(np.column_stack([J @ E, -probe.normal(x)])) > 0:
        return probe
    flip = np.ones(chart.dim + 1)
    flip[0] = -1.0
    return Immersion(chart, lambda y: flip * F(y), lambda y: flip * nu(y), engine)


def _sphere_polar(radius, m, engine):
    lower = (POLAR_BAND,) * (m - 1) + (-np.pi / 2,)
    upper = (np.pi - POLAR_BAND,) * (m - 1) + (np.pi / 2,)
    chart = Chart(m, lower, upper, f"sphere_polar(r={radius:g},m={m})")
    metric = MetricField(chart, lambda x: _sphere_polar_metric(x, radius))
    imm = _orient(chart, lambda x: _sphere_polar_point(x, radius),
                  lambda x: _sphere_polar_point(x, 1.0), engine)
    return chart, metric, imm


def _sphere_stereo(radius, m, engine):
    chart = Chart(m, (-1.0,) * m, (1.0,) * m, f"sphere_stereo(r={radius:g},m={m})")
    metric = MetricField(
        chart, lambda u: (2.0 * radius / (1.0 + u @ u)) ** 2 * np.eye(m))
    imm = _orient(chart, lambda u: _stereo_point(u, radius),
                  lambda u: _stereo_point(u, 1.0), engine)
    return chart, metric, imm


def _cylinder(m, k, radius, engine, flat_first):
    """``S^m(radius) x R^k`` in ``R^(m+k+1)``, sphere in polar coordinates."""
    sph_lo = (POLAR_BAND,) * (m - 1) + (-np.pi / 2,)
    sph_hi = (np.pi - POLAR_BAND,) * (m - 1) + (np.pi / 2,)
    flat_lo, flat_hi = (-1.0,) * k, (1.0,) * k
    if flat_first:
        lower, upper = flat_lo + sph_lo, flat_hi + sph_hi
        sph, flat = slice(k, k + m), slice(0, k)
    else:
        lower, upper = sph_lo + flat_lo, sph_hi + flat_hi
        sph, flat = slice(0, m), slice(m, m + k)
    name = "product" if flat_first else "cylinder_product"
    chart = Chart(m + k, lower, upper, f"{name}(m={m},k={k},r={radius:g})")

    def metric_fn(x):
        g = np.zeros((m + k, m + k))
        g[sph, sph] = _sphere_polar_metric(x[sph], radius)
        g[flat, flat] = np.eye(k)
        return g

    def point(x):
        return np.concatenate([_sphere_polar_point(x[sph], radius), x[flat]])

    def normal(x):
        return np.concatenate([_sphere_polar_point(x[sph], 1.0), np.zeros(k)])

    imm = _orient(chart, point, normal, engine)
    return chart, MetricField(chart, metric_fn), imm


CATALOG = ("flat", "torus", "sphere_polar", "sphere_stereo", "cylinder_product", "product")


def builtin_chart(name: str, params=(), engine: DiffEngine = DEFAULT_ENGINE):
    """Return ``(chart, metric, immersion_or_None)`` for a catalog geometry.

    ==================  ==========================  =================================
    name                params                      geometry
    ==================  ==========================  =================================
    flat                ``[n]``                     plane ``(-1, 1)^n``, immersed in
                                                    ``R^(n+1)``
    torus               ``[n]``                     flat torus chart ``(0, 2 pi)^n``
    sphere_polar        ``[radius, m=2]``           ``S^m`` in hyperspherical angles
    sphere_stereo       ``[radius, m=2]``           ``S^m`` stereographic, ``(-1,1)^m``
    cylinder_product    ``[m, k, radius=1]``        ``S^m x R^k``, sphere axes first
    product             ``[k, m, radius=1]``        ``R^k x S^m``, flat axes first
    ==================  ==========================  =================================
    """
    params = list(params)

    def count(i, default=None):
        if i < len(params):
            v = params[i]
        elif default is not None:
            v = default
        else:
            raise ValueError(f"{name} needs at least {i + 1} parameters")
        if float(v) != int(v) or int(v) < 1:
            raise ValueError(f"{name}: parameter {i} must be a positive integer, got {v}")
        return int(v)

    def positive(i, default=None):
        v = params[i] if i < len(params) else default
        if v is None:
            raise ValueError(f"{name} needs at least {i + 1} parameters")
        if not float(v) > 0:
            raise ValueError(f"{name}: parameter {i} must be positive, got {v}")
        return float(v)

    if name == "flat":
        n = count(0)
        chart = Chart(n, (-1.0,) * n, (1.0,) * n, f"flat(n={n})")
        metric = MetricField(chart, lambda x: np.eye(n))
        nu = np.zeros(n + 1)
        nu[-1] = -1.0
        imm = _orient(chart, lambda x: np.concatenate([x, [0.0]]), lambda x: nu, engine)
        return chart, metric, imm
    if name == "torus":
        n = count(0)
        chart = Chart(n, (0.0,) * n, (2 * np.pi,) * n, f"torus(n={n})")
        return chart, MetricField(chart, lambda x: np.eye(n)), None
    if name == "sphere_polar":
        return _sphere_polar(positive(0), count(1, 2), engine)
    if name == "sphere_stereo":
        return _sphere_stereo(positive(0), count(1, 2), engine)
    if name == "cylinder_product":
        return _cylinder(count(0), count(1), positive(2, 1.0), engine, flat_first=False)
    if name == "product":
        return _cylinder(count(1), count(0), positive(2, 1.0), engine, flat_first=True)
    raise ValueError(f"unknown chart {name!r}; expected one of {CATALOG}")
