"""Registry of verification suites.

A suite runs once per selected geometry and returns check results; some
suites also run fixed negative controls.  All randomness comes from a
generator seeded by ``(seed, suite, geometry)``.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import spin, tensorcalc as tc, warped as W
from ..charts import orthonormal_frame, second_fundamental_form
from ..clifford import (
    clifford_algebra,
    hypersurface_identification,
    intertwining_residual,
    relation_residual,
    volume_element,
)
from ..errors import ConfigError, PreconditionError, SpinconeError
from .anchors import anchor
from .catalog import Geometry, GeometryCache
from .report import Accumulator, CheckResult


@dataclass
class Context:
    suite: str
    anchor: str
    seed: int
    engine: tc.DiffEngine
    samples: int
    tolerances: dict
    cache: GeometryCache
    _accs: list = field(default_factory=list)

    def rng(self, geometry: str) -> np.random.Generator:
        return np.random.default_rng(
            [self.seed, zlib.crc32(self.suite.encode()), zlib.crc32(geometry.encode())])

    def acc(self, check: str, geo: Geometry | str, tol: float, anchor_key: str | None = None) -> Accumulator:
        name = geo if isinstance(geo, str) else geo.name
        label = self.anchor if anchor_key is None else anchor(anchor_key)
        a = Accumulator(f"{self.suite}.{check}", label, name, float(self.tolerances.get(check, tol)))
        self._accs.append(a)
        return a

    def drain(self) -> list[CheckResult]:
        out = [a.result() for a in self._accs]
        self._accs = []
        return out


@dataclass(frozen=True)
class Suite:
    name: str
    geometries: tuple
    samples: int
    run: Callable[[Context, Geometry], None]
    controls: Callable[[Context], None] | None = None
    kinds: tuple = ("hypersurface",)

    @property
    def anchor(self) -> str:
        return anchor(self.name)


def _unit_spinor(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def _frame_h(psi, x):
    E = orthonormal_frame(psi.metric, x)
    return E.T @ second_fundamental_form(psi.immersion)(x) @ E


def _restricted(ctx, geo, rng):
    d = clifford_algebra(geo.immersion.ambient_dim).spinor_dim
    return spin.restrict_parallel_spinor(geo.immersion, _unit_spinor(rng, d), ctx.engine)


# ------------------------------------------------------------ algebra

def _run_clifford(ctx, geo):
    alg = clifford_algebra(geo.dim)
    ctx.acc("relations", geo, 1e-13).add(relation_residual(alg))
    vol = volume_element(alg)
    eye = np.eye(alg.spinor_dim)
    ctx.acc("volume_square", geo, 1e-13).add(np.abs(vol.matrix @ vol.matrix - eye).max())
    split = ctx.acc("chirality_split", geo, 1e-13)
    if vol.central:
        sign = np.sign(vol.matrix[0, 0].real)
        split.add(np.abs(vol.matrix - sign * eye).max())
    else:
        w = np.linalg.eigvalsh(0.5 * (vol.matrix + vol.matrix.conj().T))
        plus = int(np.sum(w > 0))
        if plus != alg.spinor_dim // 2:
            split.fail(f"eigenvalue +1 has multiplicity {plus}, expected {alg.spinor_dim // 2}")
        split.add(np.abs(np.abs(w) - 1.0).max())


def _run_identification(ctx, geo):
    ident = hypersurface_identification(geo.dim + 1)
    ctx.acc("intertwining", geo, 1e-13).add(intertwining_residual(ident))
    M = ident.matrix @ ident.domain
    ctx.acc("isometry", geo, 1e-13).add(np.abs(M.conj().T @ M - np.eye(M.shape[1])).max())


# --------------------------------------------------------- spinor side

def _run_gauss(ctx, geo):
    imm = geo.immersion
    rng = ctx.rng(geo.name)
    res = ctx.acc("gauss_residual", geo, 1e-5)
    routes = ctx.acc("connection_routes", geo, 1e-5)
    conn = ctx.acc("spin_connection_routes", geo, 1e-6)
    d = clifford_algebra(imm.ambient_dim).spinor_dim
    for x in imm.chart.sample(ctx.samples, rng):
        phi = _unit_spinor(rng, d)
        psi = spin.restrict_parallel_spinor(imm, phi, ctx.engine)
        intrinsic = spin.covariant_derivatives(psi, x)
        hf = _frame_h(psi, x)
        ps = psi(x)
        shape = np.array([psi.algebra.vector(hf[:, k]) @ ps for k in range(psi.dim)])
        res.add(np.linalg.norm(intrinsic + 0.5 * shape, axis=1).max(), x)
        routes.add(np.abs(intrinsic - spin.covariant_derivatives(psi, x, method="gauss")).max(), x)
        W1 = spin.spin_connection(psi.metric, x, ctx.engine)
        W2 = spin.spin_connection(psi.metric, x, ctx.engine, method="koszul")
        conn.add(np.abs(W1 - W2).max(), x)


def _run_em(ctx, geo):
    rng = ctx.rng(geo.name)
    psi = _restricted(ctx, geo, rng)
    twice = ctx.acc("twice_T_minus_h", geo, 1e-5)
    half = ctx.acc("T_half_identity", geo, 1e-5) if geo.unit_sphere_dim else None
    norms, traces, pts = [], [], psi.chart.sample(ctx.samples, rng)
    for x in pts:
        em = spin.energy_momentum(psi, x)
        twice.add(np.abs(2.0 * em.frame - _frame_h(psi, x)).max(), x)
        if half is not None:
            half.add(np.abs(em.frame - 0.5 * np.eye(psi.dim)).max(), x)
        norms.append(np.linalg.norm(psi(x)))
        traces.append(em.trace)
    _spread(ctx.acc("norm_spread", geo, 1e-6), norms, pts)
    _spread(ctx.acc("trace_spread", geo, 1e-6), traces, pts)


def _spread(acc, values, pts):
    values = np.asarray(values)
    acc.add(values.max() - values.min(), pts[int(np.argmax(np.abs(values - np.median(values))))])
    acc.samples = len(values)


def _run_traces(ctx, geo):
    rng = ctx.rng(geo.name)
    psi = _restricted(ctx, geo, rng)
    tk = ctx.acc("tkilling_residual", geo, 1e-5)
    ident = ctx.acc("trace_identity", geo, 1e-5, "eq24")
    div = ctx.acc("divergence", geo, 1e-5, "eq25")
    Tfield = spin.em_tensor_field(psi)
    trace_sq, pts = [], psi.chart.sample(ctx.samples, rng)
    for x in pts:
        tk.add(spin.t_killing_residual(psi, x), x)
        em = spin.energy_momentum(psi, x)
        S = tc.scalar_curvature(psi.metric, x, ctx.engine)
        ident.add(abs(em.trace ** 2 - (0.25 * S + em.norm2)), x)
        div.add(np.abs(tc.divergence_symtensor(Tfield, psi.metric, x, ctx.engine)).max(), x)
        trace_sq.append(em.trace ** 2)
    _spread(ctx.acc("trace_sq_constant", geo, 1e-5, "eq24"), trace_sq, pts)


def _run_curvature(ctx, geo):
    rng = ctx.rng(geo.name)
    psi = _restricted(ctx, geo, rng)
    act = ctx.acc("curvature_action", geo, 1e-4, "eq29")
    ric = ctx.acc("ricci_identity", geo, 1e-4, "eq210")
    m = geo.unit_sphere_dim
    sph = ctx.acc("sphere_ricci_closed_form", geo, 1e-5, "eq210") if m else None
    for x in psi.chart.sample(ctx.samples, rng):
        try:
            act.add(spin.curvature_action_residual(psi, x), x)
        except PreconditionError as exc:
            act.fail(str(exc), exc.residual, x)
            continue
        ri = spin.ricci_identity(psi, x)
        ric.add(max(np.abs(ri.ricci_action - ri.curvature_trace).max(),
                    np.abs(ri.ricci_action - ri.closed_form).max()) / ri.psi_norm, x)
        if sph is not None:
            target = (m - 1) * np.array([g @ psi(x) for g in psi.algebra.gammas])
            sph.add(max(np.abs(ri.closed_form - target).max(),
                        np.abs(ri.ricci_action - target).max()) / ri.psi_norm, x)


def _run_killing(ctx, geo):
    rng = ctx.rng(geo.name)
    psi = _restricted(ctx, geo, rng)
    kd = ctx.acc("killing_defect", geo, 1e-5)
    cod = ctx.acc("codazzi_T", geo, 1e-5)
    real = ctx.acc("V_real", geo, 1e-9)
    Tfield = spin.em_tensor_field(psi)
    for x in psi.chart.sample(ctx.samples, rng):
        kd.add(np.abs(spin.killing_defect(psi, x)).max(), x)
        cod.add(np.abs(tc.codazzi_defect(Tfield, psi.metric, x, ctx.engine)).max(), x)
        real.add(spin.killing_vector(psi, x, return_imag=True)[1], x)


def _run_hijazi(ctx, geo):
    rng = ctx.rng(geo.name)
    psi = _restricted(ctx, geo, rng)
    n = psi.dim
    eig = ctx.acc("dirac_eigenspinor", geo, 1e-5)
    lam_tr = ctx.acc("eigenvalue_sq_vs_trace_sq", geo, 1e-5)
    lam_sq, integrand, fried, pts = [], [], [], psi.chart.sample(ctx.samples, rng)
    for x in pts:
        ps = psi(x)
        D = spin.dirac(psi, x)
        lam = np.vdot(ps, D).real / np.vdot(ps, ps).real
        eig.add(np.linalg.norm(D - lam * ps) / np.linalg.norm(ps), x)
        em = spin.energy_momentum(psi, x)
        lam_tr.add(abs(lam ** 2 - em.trace ** 2), x)
        lam_sq.append(lam ** 2)
        integrand.append(spin.hijazi_integrand(psi, x))
        fried.append(spin.friedrich_integrand(psi.metric, x, ctx.engine))
    lam_sq, integrand, fried = map(np.asarray, (lam_sq, integrand, fried))
    eq = ctx.acc("hijazi_equality", geo, 1e-5)
    eq.add(abs(lam_sq.max() - integrand.min()), pts[int(np.argmin(integrand))])
    eq.add(abs(lam_sq.min() - integrand.min()), pts[int(np.argmin(integrand))])
    eq.samples = len(pts)
    if geo.unit_sphere_dim:
        m = geo.unit_sphere_dim
        expected = m * m / 4.0
        val = ctx.acc("unit_sphere_value", geo, 1e-5)
        for arr in (lam_sq, integrand):
            j = int(np.argmax(np.abs(arr - expected)))
            val.add(abs(arr[j] - expected), pts[j])
        val.samples = len(pts)
        fr = ctx.acc("friedrich_integrand", geo, 1e-6, "friedrich")
        for j, v in enumerate(fried):
            fr.add(abs(v - expected), pts[j])


# ------------------------------------------------------------ warped side

def _warped_points(ctx, geo, rng, t_min_offset=0.0):
    return geo.warped.sample(ctx.samples, rng, t_min_offset)


def _closed_vs_oracle(ctx, geo, closed_fn, oracle_fn, tol, anchor_keys=None):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    accs = {}
    for p in _warped_points(ctx, geo, rng):
        x, t = p[:-1], p[-1]
        dev = W.deviation(closed_fn(wg, x, t), oracle_fn(wg, x, t))
        for key, val in dev.items():
            if key not in accs:
                akey = None if anchor_keys is None else anchor_keys.get(key)
                accs[key] = ctx.acc(key, geo, tol, akey)
            accs[key].add(val, p)
    return rng


def _run_prop33(ctx, geo):
    wg = geo.warped
    rng = _closed_vs_oracle(ctx, geo, W.connection_closed_form, W.connection_oracle, 1e-5)
    n = wg.dim
    t1 = ctx.acc("t1_consistency", geo, 1e-5)
    for x in wg.chart.sample(ctx.samples, rng):
        gam = tc.christoffel(wg.ambient, wg.point(x, 1.0), ctx.engine)
        base = tc.christoffel(wg.metric, x, ctx.engine)
        normal = -0.5 * wg.warp.df(1.0) * wg.h(x)
        t1.add(max(np.abs(gam[:n, :n, :n] - base).max(), np.abs(gam[n, :n, :n] - normal).max()), x)
    if wg.warp.tag == "classic":
        cone = ctx.cache.get("sphere_cone").warped
        spec = ctx.acc("warp_specialization", geo, 1e-6, "remark36")
        ht = ctx.acc("H_t_classic", geo, 1e-12, "remark36")
        for p in _warped_points(ctx, geo, rng):
            x, t = p[:-1], p[-1]
            dev = W.deviation(W.connection_closed_form(wg, x, t), W.connection_closed_form(cone, x, t))
            spec.add(max(dev.values()), p)
            ht.add(np.abs(W.endo_H_t(wg, x, t) - np.eye(n) / t ** 2).max(), p)


_PROP34_ANCHORS = {
    "nabla_X_nabla_t_t": "eq35", "nabla_t_nabla_t_t": "eq35",
    "nabla_t_nabla_X_t": "eq36", "nabla_t_nabla_t_X": "eq36",
    "nabla_X_nabla_t_Y": "eq37", "nabla_X_nabla_Y_t": "eq37",
    "nabla_t_nabla_X_Y": "eq38", "nabla_X_nabla_Y_Z": "eq39",
}


def _run_prop34(ctx, geo):
    _closed_vs_oracle(ctx, geo, W.second_cov_closed_form, W.second_cov_oracle, 1e-5, _PROP34_ANCHORS)


def _run_prop35(ctx, geo):
    # nested differencing allows 1e-4 in general; parallel h must reach 1e-5
    tol = 1e-5 if geo.parallel_h else 1e-4
    _closed_vs_oracle(ctx, geo, W.curvature_closed_form, W.curvature_oracle, tol)


def _run_extrinsic(ctx, geo):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    accs = {}
    for x in wg.chart.sample(ctx.samples, rng):
        for key, (lhs, rhs) in W.cone_extrinsic_forms(wg, x).items():
            if key not in accs:
                accs[key] = ctx.acc(key, geo, 1e-5)
            accs[key].add(np.abs(lhs - rhs).max(), x)


def _run_bt(ctx, geo):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    n = wg.dim
    pts = _warped_points(ctx, geo, rng, t_min_offset=0.05)
    gt = ctx.acc("G_t_formula", geo, 1e-12)
    frame = ctx.acc("adapted_frame_orthonormal", geo, 1e-10)
    for p in pts:
        x, t = p[:-1], p[-1]
        gt.add(np.abs(W.endo_G_t(wg, x, t) - np.linalg.solve(wg.metric(x), wg.g_t(t)(x))).max(), p)
        F = W.adapted_frame(wg, x, t)
        frame.add(np.abs(F.T @ wg.ambient(p) @ F - np.eye(n + 1)).max(), p)
    if geo.parallel_h:
        shift = ctx.acc("parallel_shift", geo, 1e-6)
        for p in pts:
            x, t = p[:-1], p[-1]
            diff = tc.christoffel(wg.g_t(t), x, ctx.engine) - tc.christoffel(wg.metric, x, ctx.engine)
            shift.add(np.abs(diff).max(), p)
        return
    tol = float(ctx.tolerances.get("shift_coefficient", 1e-6))
    res = W.connection_shift_check(wg, pts, tol)
    detail = ", ".join(f"c={c:g}: {r:.3e}" for c, r in res.residuals.items())
    if res.coefficient is not None:
        acc = ctx.acc(f"shift_coefficient={res.coefficient:g}", geo, tol)
        acc.add(res.residuals[res.coefficient])
        acc.message = f"residuals {detail}; max shift {res.shift_norm:.3e}"
    else:
        acc = ctx.acc("shift_coefficient=undetermined", geo, tol)
        acc.fail(f"no unique coefficient ({detail})", min(res.residuals.values()))
    if res.shift_norm < 1e3 * tol:
        acc.fail(f"comparison not decisive: max shift {res.shift_norm:.3e}", acc.worst)
    acc.samples = len(pts)


def _run_cor42(ctx, geo):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    tol = float(ctx.tolerances.get("index_reading", 1e-5))
    worst = {r: (0.0, None) for r in W.READINGS}
    hyp = ctx.acc("hypotheses", geo, 1e-5, "prop41")
    pts = _warped_points(ctx, geo, rng)
    for p in pts:
        x, t = p[:-1], p[-1]
        h = W.check_ricci_hypotheses(wg, x)
        hyp.add(max(h["nabla_h"], h["ricci_condition"]), p)
        try:
            closed = {r: W.ricci_cone_closed_form(wg, x, t, r) for r in W.READINGS}
        except PreconditionError as exc:
            acc = ctx.acc("index_reading", geo, tol, "cor42")
            acc.fail(f"hypotheses of {anchor('prop41')} not met: {exc}", exc.residual, p)
            acc.samples = len(pts)
            return
        oracle = W.ricci_cone_oracle(wg, x, t)
        for r in W.READINGS:
            d = float(np.abs(closed[r] - oracle).max())
            if d > worst[r][0]:
                worst[r] = (d, p)
    matching = [r for r in W.READINGS if worst[r][0] <= tol]
    detail = ", ".join(f"reading {r}: {worst[r][0]:.3e}" for r in W.READINGS)
    if len(matching) == 1:
        r = matching[0]
        acc = ctx.acc(f"index_reading={r}", geo, tol, "cor42")
        acc.add(worst[r][0], worst[r][1])
        acc.message = detail
    else:
        acc = ctx.acc("index_reading=undetermined", geo, tol, "cor42")
        acc.fail(f"no unique matching reading ({detail})", min(v[0] for v in worst.values()))
    acc.samples = len(pts)


def _control_cor42(ctx):
    geo = ctx.cache.get("sphere_r2_h_eq_g")
    wg = geo.warped
    rng = ctx.rng("control:" + geo.name)
    acc = ctx.acc("rejects_violated_hypotheses", geo, 1e-3, "prop41")
    ric_norm = 0.0
    for p in wg.sample(5, rng):
        x, t = p[:-1], p[-1]
        ric_norm = max(ric_norm, float(np.abs(W.ricci_cone_oracle(wg, x, t)).max()))
        try:
            W.ricci_cone_closed_form(wg, x, t)
        except PreconditionError as exc:
            acc.add(abs(exc.residual - 0.75), p)
        else:
            acc.fail("closed form accepted a geometry violating its hypotheses", math.inf, p)
    acc.message = (f"hypotheses of {anchor('prop41')} rejected as expected; "
                   f"oracle Ricci of this cone max |Ric| = {ric_norm:.3e}")


def _run_remark43(ctx, geo):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    riem = ctx.acc("ambient_riemann", geo, 1e-5)
    ric = ctx.acc("ambient_ricci", geo, 1e-5)
    for p in _warped_points(ctx, geo, rng):
        cur = tc.curvature(wg.ambient, p, ctx.engine)
        riem.add(np.abs(cur.riemann).max(), p)
        ric.add(np.abs(cur.ricci).max(), p)


def _run_thm51(ctx, geo):
    wg = geo.warped
    rng = ctx.rng(geo.name)
    ric = ctx.acc("ambient_ricci", geo, 1e-5)
    cond = ctx.acc("ricci_condition", geo, 1e-6, "prop41")
    proj = ctx.acc("projector", geo, 1e-12)
    for p in _warped_points(ctx, geo, rng):
        x = p[:-1]
        ric.add(np.abs(tc.ricci(wg.ambient, p, ctx.engine)).max(), p)
        cond.add(np.abs(W.ricci_condition_residual(wg.metric, wg.h, x, ctx.engine)).max(), x)
        H = np.linalg.solve(wg.metric(x), wg.h(x))
        proj.add(np.abs(H @ H - H).max(), x)
    if geo.immersion is None:
        return
    psi = _restricted(ctx, geo, rng)
    tk = ctx.acc("tkilling_residual", geo, 1e-5)
    twice = ctx.acc("twice_T_equals_h", geo, 1e-5)
    for x in wg.chart.sample(ctx.samples, rng):
        tk.add(spin.t_killing_residual(psi, x), x)
        twice.add(np.abs(2.0 * spin.energy_momentum(psi, x).coords - wg.h(x)).max(), x)


_SPHERES_ETC = ("cylinder", "plane", "sphere2", "sphere4")

SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("clifford_relations", tuple(f"dim{n}" for n in range(1, 9)), 1, _run_clifford, kinds=("algebra",)),
    Suite("identification_eq21", tuple(f"dim{n}" for n in range(1, 9)), 1, _run_identification,
          kinds=("algebra",)),
    Suite("gauss_formula_eq22", _SPHERES_ETC, 100, _run_gauss),
    Suite("em_tensor_prop24", _SPHERES_ETC, 100, _run_em),
    Suite("tkilling_traces_eq24_25", ("cylinder", "sphere2"), 50, _run_traces),
    Suite("curvature_ids_eq29_210", ("cylinder", "sphere2", "sphere3"), 50, _run_curvature),
    Suite("killing_vector_prop27", ("sphere2",), 50, _run_killing),
    Suite("hijazi_integrand_eq23", ("sphere2",), 50, _run_hijazi),
    Suite("oneill_prop33", ("product_h0", "sphere_classic", "sphere_cone", "torus_nonparallel"), 50,
          _run_prop33, kinds=("warped",)),
    Suite("oneill_prop34", ("product_h0", "sphere_cone", "torus_nonparallel"), 50, _run_prop34,
          kinds=("warped",)),
    Suite("oneill_prop35", ("product_h0", "sphere_cone", "torus_nonparallel"), 50, _run_prop35,
          kinds=("warped",)),
    Suite("cone_extrinsic_s3", ("cylinder_cone", "product_h0", "sphere_cone", "torus_nonparallel_cone"), 50,
          _run_extrinsic, kinds=("warped",)),
    Suite("bt_gt_s4", ("flat_x2dx1", "projector_cone", "sphere_cone", "torus_nonparallel_cone"), 50, _run_bt,
          kinds=("warped",)),
    Suite("ricci_cor42", ("projector_cone", "sphere_cone"), 50, _run_cor42, _control_cor42, kinds=("warped",)),
    Suite("ricci_flat_remark43", ("sphere3_cone", "sphere_cone"), 50, _run_remark43, kinds=("warped",)),
    Suite("ricci_flat_thm51", ("projector_cone",), 100, _run_thm51, kinds=("warped",)),
)}


def list_suites() -> list[str]:
    return sorted(SUITES)


_CONE_ONLY = {"cone_extrinsic_s3", "bt_gt_s4", "ricci_cor42"}


def run_suite_checks(suite: Suite, ctx: Context, geometries) -> list[CheckResult]:
    """Run ``suite`` over ``geometries``; errors inside a geometry become failed checks."""
    results = []
    for name in geometries:
        geo = ctx.cache.get(name)
        if geo.kind not in suite.kinds:
            raise ConfigError(f"suite {suite.name} cannot run on {geo.kind} geometry {name!r}")
        if suite.name in _CONE_ONLY and geo.warped.warp.tag != "cone":
            raise ConfigError(f"suite {suite.name} needs a cone-warp geometry, {name!r} is not one")
        try:
            suite.run(ctx, geo)
        except SpinconeError as exc:
            ctx.acc("error", geo, 0.0).fail(f"{type(exc).__name__}: {exc}")
        results.extend(ctx.drain())
    if suite.controls is not None:
        suite.controls(ctx)
        results.extend(ctx.drain())
    return results
