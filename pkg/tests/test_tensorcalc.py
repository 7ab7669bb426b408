import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spincone import tensorcalc as tc
from spincone.charts import Chart, MetricField, builtin_chart
from spincone.errors import DomainError, PositiveDefinitenessError


def _poly(x):
    return np.array([x[0] ** 3 * x[1], np.sin(x[0]) + x[1] ** 2])


def _poly_grad(x):
    return np.array([[3 * x[0] ** 2 * x[1], np.cos(x[0])], [x[0] ** 3, 2 * x[1]]])


@pytest.mark.parametrize("scheme", tc.SCHEMES)
def test_gradient_matches_exact(scheme):
    eng = tc.DiffEngine(scheme)
    x = np.array([0.3, -0.7])
    tol = {"central_2nd_order": 1e-7, "central_4th_order": 1e-8, "richardson": 1e-8}[scheme]
    assert np.abs(tc.gradient(_poly, x, eng) - _poly_grad(x)).max() < tol


def test_richardson_is_fourth_order():
    f = np.exp
    x = np.array([0.2])
    errs = [abs(tc.partial_derivative(lambda y: f(y[0]), x, 0, tc.DiffEngine("richardson", h))
                - np.exp(0.2)) for h in (0.1, 0.05)]
    assert 12 < errs[0] / errs[1] < 20


def test_schemes_agree_on_curvature():
    _, g, _ = builtin_chart("sphere_polar", [1.0, 2])
    x = np.array([1.1, 0.3])
    coarse = tc.riemann(g, x, tc.DiffEngine("central_2nd_order", 1e-3))
    fine = tc.riemann(g, x)
    # second-order truncation with step 1e-3 on O(1) curvature
    assert np.abs(coarse - fine).max() < 10 * 1e-5


def test_engine_validation():
    with pytest.raises(ValueError):
        tc.DiffEngine("forward")
    with pytest.raises(ValueError):
        tc.DiffEngine(step=-1.0)
    with pytest.raises(ValueError):
        tc.DiffEngine(axis_scale=(1.0, 0.0))
    assert tc.DiffEngine().step == 1e-2
    assert tc.DiffEngine("central_2nd_order").step == 1e-4
    assert tc.DiffEngine(axis_scale=(1.0, 2.0)).h(1) == 2e-2


def test_stencil_leaving_chart_is_rejected():
    chart = Chart(1, (0.0,), (1.0,))
    field = MetricField(chart, lambda x: np.eye(1) * (1 + x[0] ** 2))
    with pytest.raises(DomainError):
        tc.gradient(field, np.array([0.015]))
    tc.gradient(field, np.array([0.5]))


def test_christoffel_polar_plane():
    chart = Chart(2, (0.5, -1.0), (2.0, 1.0))
    g = MetricField(chart, lambda x: np.diag([1.0, x[0] ** 2]))
    r = 1.2
    gam = tc.christoffel(g, np.array([r, 0.1]))
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = -r
    expected[1, 0, 1] = expected[1, 1, 0] = 1.0 / r
    assert np.abs(gam - expected).max() < 1e-9
    assert np.abs(tc.riemann(g, np.array([r, 0.1]))).max() < 1e-7


def test_unit_sphere_curvature():
    _, g, _ = builtin_chart("sphere_polar", [1.0, 2])
    x = np.array([0.9, 0.4])
    R = tc.riemann(g, x)
    assert abs(R[0, 1, 0, 1] - np.sin(x[0]) ** 2) < 1e-7
    assert np.abs(tc.ricci(g, x) - g(x)).max() < 1e-7
    assert abs(tc.scalar_curvature(g, x) - 2.0) < 1e-7


@pytest.mark.parametrize("radius", [1.0, 2.0])
def test_stereographic_three_sphere(radius):
    _, g, _ = builtin_chart("sphere_stereo", [radius, 3])
    x = np.array([0.2, -0.3, 0.1])
    assert np.abs(tc.ricci(g, x) - 2.0 / radius ** 2 * g(x)).max() < 1e-6
    assert abs(tc.scalar_curvature(g, x) - 6.0 / radius ** 2) < 1e-6


_coef = st.floats(-0.3, 0.3)


@settings(max_examples=15, deadline=None)
@given(st.tuples(_coef, _coef, _coef, _coef))
def test_riemann_symmetries(c):
    chart = Chart(2, (-1.0, -1.0), (1.0, 1.0))

    def gfn(x):
        a = 1.0 + c[0] * np.sin(x[0]) + 0.2 * x[1] ** 2
        b = c[1] * x[0] * x[1]
        d = 1.5 + c[2] * np.cos(x[1]) + c[3] * x[0]
        return np.array([[a, b], [b, d]])

    g = MetricField(chart, gfn)
    x = np.array([0.1, -0.2])
    Rl = tc.lowered_riemann(g, x)
    scale = max(1.0, np.abs(Rl).max())
    assert np.abs(Rl + Rl.transpose(1, 0, 2, 3)).max() < 1e-6 * scale
    assert np.abs(Rl + Rl.transpose(0, 1, 3, 2)).max() < 1e-6 * scale
    assert np.abs(Rl - Rl.transpose(2, 3, 0, 1)).max() < 1e-6 * scale
    # in dimension two, R_1212 = K det g and Ric = K g
    K = Rl[0, 1, 0, 1] / np.linalg.det(g(x))
    assert np.abs(tc.ricci(g, x) - K * g(x)).max() < 1e-6 * scale


def test_metric_must_be_positive_definite():
    chart = Chart(1, (-1.0,), (1.0,))
    g = MetricField(chart, lambda x: -np.eye(1))
    with pytest.raises(PositiveDefinitenessError):
        tc.christoffel(g, np.array([0.0]))


def test_lie_bracket_and_covariant_derivative():
    x = np.array([0.3, 0.4])
    X = lambda y: np.array([y[1], 0.0])
    Y = lambda y: np.array([0.0, 1.0])
    assert np.allclose(tc.lie_bracket(X, Y, x), [-1.0, 0.0], atol=1e-10)
    _, g, _ = builtin_chart("flat", [2])
    assert np.allclose(tc.covariant_derivative_vector(X, g, x), [[0, 0], [1, 0]], atol=1e-10)


def test_parallel_tensor_has_zero_derivative():
    _, g, _ = builtin_chart("sphere_stereo", [1.0, 2])
    x = np.array([0.3, -0.1])
    assert np.abs(tc.covariant_derivative_symtensor(g, g, x)).max() < 1e-8
    assert np.abs(tc.divergence_symtensor(g, g, x)).max() < 1e-8
    assert np.abs(tc.codazzi_defect(g, g, x)).max() < 1e-8


def test_zero_tolerance_model():
    assert tc.zero_tolerance(np.array([1e-3])) == 1e-6
    assert tc.zero_tolerance(np.array([5e3])) == pytest.approx(5e-3)
    assert tc.is_approx_zero(np.array([5e-7]))
    assert not tc.is_approx_zero(np.array([2e-6]))
    assert tc.is_approx_zero(np.array([2e-6]), reference=np.array([10.0]))
