"""Acceptance criteria, checked against one full ``spincone verify --all`` run.

Every criterion asserts, for each geometry it names, that the relevant check
exists, carries a tolerance no looser than the required one, covers the
required number of samples and passes.  A few criteria add direct library
computations on top of the report.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from spincone import spin, warped as W
from spincone.charts import builtin_chart
from spincone.clifford import clifford_algebra, volume_element

pytestmark = pytest.mark.slow

RUNTIME_LIMIT = 300.0

PROP33_KEYS = ("nabla_t_t", "nabla_X_t", "nabla_t_X", "nabla_X_Y")
PROP34_KEYS = ("nabla_X_nabla_t_t", "nabla_t_nabla_t_t", "nabla_t_nabla_X_t", "nabla_t_nabla_t_X",
               "nabla_X_nabla_t_Y", "nabla_X_nabla_Y_t", "nabla_t_nabla_X_Y", "nabla_X_nabla_Y_Z")
PROP35_KEYS = ("R_tt_t", "R_tt_X", "R_Xt_t", "R_Xt_Y", "R_XY_t", "R_XY_Z")
ONEILL_GEOMETRIES = ("product_h0", "sphere_cone", "torus_nonparallel")


def _verify_all(out):
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "spincone", "verify", "--all", "--format", "json", "--out", str(out)],
        capture_output=True, text=True)
    return proc, time.perf_counter() - start


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify") / "all.json"
    proc, elapsed = _verify_all(out)
    assert proc.returncode in (0, 1), proc.stderr
    raw = out.read_bytes()
    return {"raw": raw, "doc": json.loads(raw), "elapsed": elapsed, "returncode": proc.returncode,
            "stderr": proc.stderr}


@pytest.fixture(scope="module")
def report(full_run):
    return full_run["doc"]


def _find(report, check_id, geometry):
    hits = [c for c in report["checks"] if c["id"] == check_id and c["geometry"] == geometry]
    assert len(hits) == 1, f"expected one {check_id} record on {geometry}, found {len(hits)}"
    return hits[0]


def _require(report, suite, checks, geometries, tol, samples=1):
    """Assert the listed checks passed; return the worst residual seen."""
    worst = 0.0
    for geo in geometries:
        for check in checks:
            c = _find(report, f"{suite}.{check}", geo)
            assert c["tolerance"] <= tol, f"{c['id']} on {geo}: tolerance {c['tolerance']} looser than {tol}"
            assert c["samples"] >= samples, f"{c['id']} on {geo}: only {c['samples']} samples"
            assert c["pass"], f"{c['id']} on {geo}: residual {c['max_residual']} > {c['tolerance']}"
            assert c["max_residual"] <= tol
            worst = max(worst, c["max_residual"])
    return worst


DIMS = tuple(f"dim{n}" for n in range(1, 9))
SURFACES = ("sphere2", "sphere4", "plane", "cylinder")


@pytest.mark.criterion(1, "Clifford relations, volume element and spinor identification to 1e-13")
def test_clifford_and_identification(report, record_property):
    worst = _require(report, "clifford_relations", ("relations", "volume_square", "chirality_split"),
                     DIMS, 1e-13)
    worst = max(worst, _require(report, "identification_eq21", ("intertwining", "isometry"), DIMS, 1e-13))
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(2, "Gauss formula for restricted spinors on S^2, S^4, plane, S^2 x R")
def test_gauss_formula(report, record_property):
    worst = _require(report, "gauss_formula_eq22", ("gauss_residual",), SURFACES, 1e-5, samples=100)
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(3, "Energy-momentum tensor: 2T = h, constant norm and trace, T = Id/2 on S^2")
def test_energy_momentum(report, record_property):
    worst = _require(report, "em_tensor_prop24", ("twice_T_minus_h",), SURFACES, 1e-5, samples=100)
    spread = _require(report, "em_tensor_prop24", ("norm_spread", "trace_spread"), SURFACES, 1e-6,
                      samples=100)
    half = _require(report, "em_tensor_prop24", ("T_half_identity",), ("sphere2",), 1e-5, samples=100)
    record_property("detail", f"2T-h {worst:.1e}, spreads {spread:.1e}, T-Id/2 {half:.1e}")


@pytest.mark.criterion(4, "Equality case on the unit S^2: eigenvalue, Hijazi and Friedrich integrands all 1")
def test_equality_case(report, record_property):
    a = _require(report, "hijazi_integrand_eq23",
                 ("dirac_eigenspinor", "eigenvalue_sq_vs_trace_sq", "hijazi_equality", "unit_sphere_value"),
                 ("sphere2",), 1e-5, samples=50)
    b = _require(report, "hijazi_integrand_eq23", ("friedrich_integrand",), ("sphere2",), 1e-6, samples=50)
    # direct evaluation at one point
    _, _, imm = builtin_chart("sphere_polar", [1.0, 2])
    psi = spin.restrict_parallel_spinor(imm, np.array([0.6, 0.8j]))
    x = np.array([1.0, 0.3])
    ps = psi(x)
    lam = np.vdot(ps, spin.dirac(psi, x)).real / np.vdot(ps, ps).real
    em = spin.energy_momentum(psi, x)
    assert abs(lam ** 2 - 1.0) < 1e-5 and abs(em.trace ** 2 - 1.0) < 1e-5
    assert abs(spin.hijazi_integrand(psi, x) - 1.0) < 1e-5
    assert abs(spin.friedrich_integrand(psi.metric, x) - 1.0) < 1e-6
    record_property("detail", f"max {max(a, b):.1e}")


@pytest.mark.criterion(5, "Trace identity and divergence-free T on sphere and cylinder")
def test_trace_and_divergence(report, record_property):
    worst = _require(report, "tkilling_traces_eq24_25", ("trace_identity", "divergence", "tkilling_residual"),
                     ("sphere2", "cylinder"), 1e-5, samples=50)
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(6, "Spinorial curvature and Ricci identities; Ric(X).psi = (n-1) X.psi on spheres")
def test_curvature_identities(report, record_property):
    worst = _require(report, "curvature_ids_eq29_210", ("curvature_action", "ricci_identity"),
                     ("sphere2", "cylinder"), 1e-4, samples=50)
    sph = _require(report, "curvature_ids_eq29_210", ("sphere_ricci_closed_form",), ("sphere2", "sphere3"),
                   1e-5, samples=50)
    record_property("detail", f"identities {worst:.1e}, sphere closed form {sph:.1e}")


@pytest.mark.criterion(7, "Symmetrized derivative of the Killing vector vanishes on S^2")
def test_killing_vector(report, record_property):
    worst = _require(report, "killing_vector_prop27", ("killing_defect",), ("sphere2",), 1e-5, samples=50)
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(8, "Warped-product connection, second derivatives and curvature match the oracle")
def test_oneill_formulas(report, record_property):
    a = _require(report, "oneill_prop33", PROP33_KEYS, ONEILL_GEOMETRIES, 1e-5, samples=50)
    b = _require(report, "oneill_prop34", PROP34_KEYS, ONEILL_GEOMETRIES, 1e-5, samples=50)
    c = _require(report, "oneill_prop35", PROP35_KEYS, ONEILL_GEOMETRIES, 1e-4, samples=50)
    # parallel h must reach the tighter tolerance
    _require(report, "oneill_prop35", PROP35_KEYS, ("product_h0", "sphere_cone"), 1e-5, samples=50)
    record_property("detail", f"connection {a:.1e}, second {b:.1e}, curvature {c:.1e}")


@pytest.mark.criterion(9, "Cone extrinsic curvature displays at t = 1; second fundamental form is h")
def test_cone_extrinsic(report, record_property):
    geos = ("product_h0", "sphere_cone", "cylinder_cone", "torus_nonparallel_cone")
    worst = _require(report, "cone_extrinsic_s3", ("radial", "mixed", "gauss", "second_fundamental_form"),
                     geos, 1e-5, samples=50)
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(10, "Cone over the unit S^2 and S^3 is flat")
def test_sphere_cone_flat(report, record_property):
    worst = _require(report, "ricci_flat_remark43", ("ambient_riemann", "ambient_ricci"),
                     ("sphere_cone", "sphere3_cone"), 1e-5, samples=50)
    record_property("detail", f"max {worst:.1e}")


@pytest.mark.criterion(11, "Closed-form cone Ricci matches the oracle; violated hypotheses on S^2(2) rejected")
def test_cone_ricci(report, record_property):
    worst = _require(report, "ricci_cor42", ("index_reading=i",), ("sphere_cone", "projector_cone"), 1e-5,
                     samples=50)
    _require(report, "ricci_cor42", ("rejects_violated_hypotheses",), ("sphere_r2_h_eq_g",), 1e-3, samples=1)
    # direct: the Ricci condition residual on S^2(2) with h = g has magnitude 0.75
    _, g, _ = builtin_chart("sphere_polar", [2.0, 2])
    res = np.linalg.norm(W.ricci_condition_residual(g, g, np.array([1.0, 0.2])), 2)
    assert abs(res - 0.75) < 1e-3
    record_property("detail", f"closed form {worst:.1e}, rejection residual {res:.4f}")


@pytest.mark.criterion(12, "Generalized cone over S^2 x S^1-chart is Ricci flat; 2T = h on the cylinder")
def test_projector_cone_ricci_flat(report, record_property):
    ric = _require(report, "ricci_flat_thm51", ("ambient_ricci",), ("projector_cone",), 1e-5, samples=100)
    spinor = _require(report, "ricci_flat_thm51", ("tkilling_residual", "twice_T_equals_h"),
                      ("projector_cone",), 1e-5, samples=50)
    _require(report, "ricci_flat_thm51", ("projector",), ("projector_cone",), 1e-12)
    # same hypersurface, fresh spinor: the T-Killing certificate does not depend on the choice
    chart, g, imm = builtin_chart("product", [1, 2])
    wg = W.projector_cone(chart, g, 1)
    phi = volume_element(clifford_algebra(4)).plus @ np.array([1.0, 0.5j, -0.3, 0.2])
    psi = spin.restrict_parallel_spinor(imm, phi)
    x = np.array([0.3, 1.2, -0.4])
    assert spin.t_killing_residual(psi, x) < 1e-5
    assert np.abs(2 * spin.energy_momentum(psi, x).coords - wg.h(x)).max() < 1e-5
    record_property("detail", f"Ricci {ric:.1e}, spinor {spinor:.1e}")


@pytest.mark.criterion(13, "Parallel h leaves the connection unchanged; the B^t coefficient is identified")
def test_connection_shift(report, record_property):
    par = _require(report, "bt_gt_s4", ("parallel_shift",), ("sphere_cone", "projector_cone"), 1e-6, samples=50)
    found = {}
    for geo in ("flat_x2dx1", "torus_nonparallel_cone"):
        ids = [c["id"] for c in report["checks"]
               if c["geometry"] == geo and c["id"].startswith("bt_gt_s4.shift_coefficient")]
        assert len(ids) == 1, ids
        assert not ids[0].endswith("undetermined")
        _require(report, "bt_gt_s4", (ids[0].split(".", 1)[1],), (geo,), 1e-6, samples=50)
        found[geo] = ids[0].split("=", 1)[1]
    assert len(set(found.values())) == 1
    record_property("detail", f"parallel {par:.1e}, coefficient c = {found['flat_x2dx1']}")


@pytest.mark.criterion(14, "verify --all finishes under 5 minutes and is byte-identical across runs")
def test_determinism_and_runtime(full_run, tmp_path, record_property):
    assert full_run["elapsed"] < RUNTIME_LIMIT
    proc, elapsed = _verify_all(tmp_path / "again.json")
    assert proc.returncode == full_run["returncode"]
    assert elapsed < RUNTIME_LIMIT
    assert (tmp_path / "again.json").read_bytes() == full_run["raw"]
    record_property("detail", f"{full_run['elapsed']:.0f} s and {elapsed:.0f} s, "
                              f"{len(full_run['doc']['checks'])} checks")


def test_full_run_is_green(full_run):
    summary = full_run["doc"]["summary"]
    assert full_run["returncode"] == 0, full_run["stderr"]
    assert summary["failed"] == 0
