import numpy as np
import pytest

from spincone import spin
from spincone.charts import builtin_chart, orthonormal_frame, second_fundamental_form
from spincone.clifford import clifford_algebra, volume_element
from spincone.errors import PreconditionError, ZeroSetError


def _unit(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="module")
def sphere():
    return builtin_chart("sphere_polar", [1.0, 2])


@pytest.fixture(scope="module")
def sphere_psi(sphere):
    _, _, imm = sphere
    return spin.restrict_parallel_spinor(imm, _unit(np.random.default_rng(11), 2))


def test_connection_methods_agree(sphere):
    chart, g, _ = sphere
    x = np.array([1.3, -0.4])
    W1 = spin.spin_connection(g, x)
    W2 = spin.spin_connection(g, x, method="koszul")
    assert np.abs(W1 + W1.transpose(0, 2, 1)).max() == 0.0
    assert np.abs(W1 - W2).max() < 1e-7
    # polar frame e_1 = d_theta, e_2 = d_phi / sin(theta): g(nabla_{e_2} e_1, e_2) = cot(theta)
    assert W1[1, 0, 1] == pytest.approx(1.0 / np.tan(x[0]), abs=1e-7)
    with pytest.raises(ValueError):
        spin.spin_connection(g, x, method="cartan")


def test_flat_constant_spinor_is_parallel():
    chart, g, _ = builtin_chart("flat", [3])
    psi = spin.constant_spinor(chart, g, [1.0, 1j])
    x = np.array([0.1, 0.2, 0.3])
    assert np.abs(spin.covariant_derivatives(psi, x)).max() < 1e-12
    assert np.abs(spin.dirac(psi, x)).max() < 1e-12
    assert np.abs(spin.energy_momentum(psi, x).frame).max() < 1e-12


def test_restricted_spinor_routes_agree(sphere_psi):
    x = np.array([0.8, 0.5])
    a = spin.covariant_derivatives(sphere_psi, x)
    b = spin.covariant_derivatives(sphere_psi, x, method="gauss")
    assert np.abs(a - b).max() < 1e-8
    assert np.abs(spin.spinor_covariant_derivative(sphere_psi, x, 1) - a[1]).max() == 0.0
    with pytest.raises(ValueError):
        spin.covariant_derivatives(sphere_psi, x, method="other")


def test_gauss_path_needs_restricted_spinor(sphere):
    chart, g, _ = sphere
    psi = spin.constant_spinor(chart, g, [1.0, 0.0])
    with pytest.raises(ValueError):
        spin.covariant_derivatives(psi, chart.center, method="gauss")


@pytest.mark.parametrize("name,params", [
    ("sphere_polar", [1.0, 2]), ("sphere_stereo", [1.0, 3]), ("flat", [2]), ("cylinder_product", [2, 1]),
])
def test_gauss_formula(name, params):
    chart, g, imm = builtin_chart(name, params)
    rng = np.random.default_rng(5)
    d = clifford_algebra(imm.ambient_dim).spinor_dim
    for x in chart.sample(3, rng):
        assert spin.gauss_formula_residual(imm, _unit(rng, d), x) < 1e-5


def test_energy_momentum_on_unit_sphere(sphere_psi):
    for x in sphere_psi.chart.sample(4, np.random.default_rng(2)):
        em = spin.energy_momentum(sphere_psi, x)
        assert np.abs(em.frame - 0.5 * np.eye(2)).max() < 1e-6
        assert em.trace == pytest.approx(1.0, abs=1e-6)
        assert em.norm2 == pytest.approx(0.5, abs=1e-6)
        assert np.abs(em.coords - 0.5 * sphere_psi.metric(x)).max() < 1e-6
        assert np.linalg.norm(sphere_psi(x)) == pytest.approx(sphere_psi.scale, abs=1e-12)


def test_twice_T_is_h_on_cylinder():
    chart, g, imm = builtin_chart("cylinder_product", [2, 1])
    psi = spin.restrict_parallel_spinor(imm, _unit(np.random.default_rng(4), 4))
    x = np.array([1.0, 0.3, -0.2])
    T = spin.energy_momentum(psi, x).coords
    assert np.abs(2 * T - second_fundamental_form(imm)(x)).max() < 1e-6
    assert spin.t_killing_residual(psi, x) < 1e-6


def test_zero_set_is_rejected(sphere):
    chart, g, _ = sphere
    psi = spin.explicit_spinor(chart, g, lambda x: np.array([x[0] - chart.center[0], 0.0]), scale=1.0)
    with pytest.raises(ZeroSetError):
        spin.energy_momentum(psi, chart.center)


def test_odd_dimension_needs_positive_chirality():
    _, _, imm = builtin_chart("sphere_stereo", [1.0, 3])
    amb = clifford_algebra(4)
    vol = volume_element(amb)
    w, v = np.linalg.eigh(vol.matrix)
    with pytest.raises(ValueError, match="chirality"):
        spin.restrict_parallel_spinor(imm, v[:, w < 0][:, 0])
    with pytest.raises(ValueError):
        spin.restrict_parallel_spinor(imm, np.zeros(4))
    with pytest.raises(ValueError):
        spin.restrict_parallel_spinor(imm, np.ones(2))


def test_dirac_eigenvalue_on_sphere(sphere_psi):
    x = np.array([1.0, 0.1])
    ps = sphere_psi(x)
    D = spin.dirac(sphere_psi, x)
    lam = np.vdot(ps, D).real / np.vdot(ps, ps).real
    assert abs(lam) == pytest.approx(1.0, abs=1e-6)
    assert np.linalg.norm(D - lam * ps) < 1e-6


def test_integrands_on_sphere(sphere_psi):
    x = np.array([1.7, -0.6])
    assert spin.hijazi_integrand(sphere_psi, x) == pytest.approx(1.0, abs=1e-6)
    assert spin.friedrich_integrand(sphere_psi.metric, x) == pytest.approx(1.0, abs=1e-6)
    chart, g, _ = builtin_chart("flat", [1])
    with pytest.raises(ValueError):
        spin.friedrich_integrand(g, np.array([0.0]))


def test_trace_identities(sphere_psi):
    out = spin.trace_identities(sphere_psi, sphere_psi.chart.sample(3, np.random.default_rng(0)))
    assert out["max_trace_defect"] < 1e-5
    assert out["trace_sq_spread"] < 1e-6
    assert out["max_divergence"] < 1e-5
    assert out["trace_sq"].shape == (3,)


def test_killing_vector(sphere_psi):
    x = np.array([1.2, 0.7])
    V, imag = spin.killing_vector(sphere_psi, x, return_imag=True)
    assert imag < 1e-9
    assert np.array_equal(V, spin.killing_vector(sphere_psi, x))
    assert np.abs(spin.killing_defect(sphere_psi, x)).max() < 1e-6


def test_curvature_identities(sphere_psi):
    x = np.array([1.4, 0.2])
    sc = spin.spinor_curvature(sphere_psi, x)
    assert sc.from_riemann.shape == (2, 2, 2)
    assert spin.curvature_action_residual(sphere_psi, x) < 1e-5
    assert spin.ricci_identity_residual(sphere_psi, x) < 1e-5
    ri = spin.ricci_identity(sphere_psi, x)
    target = np.array([gm @ sphere_psi(x) for gm in sphere_psi.algebra.gammas])
    assert np.abs(ri.ricci_action - target).max() < 1e-6


def test_curvature_identities_need_tkilling(sphere):
    chart, g, _ = sphere
    psi = spin.explicit_spinor(chart, g, lambda x: np.array([1.0 + 0.3 * np.sin(x[1]), 0.5j * x[0]]))
    with pytest.raises(PreconditionError) as info:
        spin.curvature_action_residual(psi, chart.center)
    assert info.value.residual > spin.TKILLING_TOL
    with pytest.raises(PreconditionError):
        spin.ricci_identity_residual(psi, chart.center)
    # the unchecked Riemann route still agrees with nested derivatives for any spinor
    sc = spin.spinor_curvature(psi, chart.center)
    assert np.abs(sc.from_derivatives - sc.from_riemann).max() < 1e-5


def test_frame_gauge(sphere_psi):
    x = np.array([0.9, 0.0])
    E = orthonormal_frame(sphere_psi.metric, x)
    assert np.allclose(E, np.diag([1.0, 1.0 / np.sin(0.9)]), atol=1e-9)
