"""Spinor fields on charts: spin connection, Dirac operator, energy-momentum
tensor, T-Killing machinery and restriction of ambient parallel spinors.

Spinor components are always expressed in the Gram-Schmidt frame of the
chart metric (:func:`spincone.charts.orthonormal_frame`).  Tangent vectors
passed to Clifford multiplication are in orthonormal frame components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import tensorcalc as tc
from .charts import (
    Chart,
    Immersion,
    MetricField,
    SymTensorField,
    frame_field,
    induced_metric,
    orthonormal_frame,
    second_fundamental_form,
)
from .clifford import (
    CliffordAlgebra,
    clifford_algebra,
    hypersurface_identification,
    so_log,
    spin_lift,
)
from .errors import OrientationError, PreconditionError, ZeroSetError

ZERO_THRESHOLD = 1e-8
TKILLING_TOL = 1e-5


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Chart-local spinor field in the Gram-Schmidt frame gauge.

    ``origin`` is ``"explicit"`` or ``"restricted"``; restricted fields also
    carry the immersion, the ambient constant spinor and the adapted ambient
    frame used to build them.
    """

    chart: Chart
    metric: MetricField
    algebra: CliffordAlgebra
    fn: Callable[[np.ndarray], np.ndarray]
    origin: str = "explicit"
    engine: tc.DiffEngine = field(default=tc.DEFAULT_ENGINE)
    scale: float = 1.0
    immersion: Immersion | None = None
    ambient_spinor: np.ndarray | None = None
    ambient_frame: Callable | None = None
    ambient_components: Callable | None = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=complex)

    @property
    def dim(self) -> int:
        return self.chart.dim


def explicit_spinor(chart, metric, fn, engine=tc.DEFAULT_ENGINE, scale=None) -> SpinorField:
    alg = clifford_algebra(chart.dim)
    if scale is None:
        scale = float(np.linalg.norm(fn(chart.center)))
    return SpinorField(chart, metric, alg, fn, "explicit", engine, scale)


def constant_spinor(chart, metric, value, engine=tc.DEFAULT_ENGINE) -> SpinorField:
    value = np.array(value, dtype=complex)
    value.setflags(write=False)
    return explicit_spinor(chart, metric, lambda x: value, engine)


# ------------------------------------------------------ connection and nabla

def spin_connection(g, x, engine=tc.DEFAULT_ENGINE, method: str = "christoffel") -> np.ndarray:
    """``W[k, a, b] = g(nabla_{e_k} e_a, e_b)`` in the Gram-Schmidt frame.

    ``method="christoffel"`` uses Levi-Civita symbols and frame derivatives;
    ``method="koszul"`` uses only frame brackets.  Both are antisymmetric in
    ``a, b`` by construction.
    """
    x = np.asarray(x, dtype=float)
    gx = np.asarray(g(x))
    E = orthonormal_frame(g, x)
    dE = tc.gradient(frame_field(g), x, engine)  # dE[m, i, a] = d_m E[i, a]
    if method == "christoffel":
        gam = tc.christoffel(g, x, engine)
        coord = np.einsum("mk,mia->kia", E, dE) + np.einsum("mk,imj,ja->kia", E, gam, E)
        W = np.einsum("kia,ij,jb->kab", coord, gx, E)
        return 0.5 * (W - W.transpose(0, 2, 1))
    if method == "koszul":
        brk = np.einsum("ma,mib->abi", E, dE) - np.einsum("mb,mia->abi", E, dE)
        c = np.einsum("abi,ij,jd->abd", brk, gx, E)
        return 0.5 * (c - c.transpose(0, 2, 1) - np.einsum("abk->kab", c))
    raise ValueError(f"unknown method {method!r}")


def _connection_matrices(alg, W):
    return np.array([alg.bivector(W[k]) for k in range(W.shape[0])])


def _frame_nabla(u, g, alg, x, engine):
    """Covariant derivatives along every frame direction of a spinor-valued
    map ``u`` (trailing axis = spinor index); result axis 0 is the direction."""
    E = orthonormal_frame(g, x)
    du = tc.gradient(u, x, engine)
    directional = np.einsum("mk,m...->k...", E, du)
    conn = _connection_matrices(alg, spin_connection(g, x, engine))
    return directional + np.einsum("kab,...b->k...a", conn, u(x))


def _engine(psi, engine):
    return psi.engine if engine is None else engine


def covariant_derivatives(psi: SpinorField, x, engine=None, method: str = "intrinsic") -> np.ndarray:
    """``out[k] = nabla_{e_k} psi`` for every frame direction.

    ``method="gauss"`` (restricted fields only) differentiates the ambient
    spinor in the adapted frame, maps it through the identification and
    subtracts ``1/2 h(e_k) . psi``.
    """
    engine = _engine(psi, engine)
    x = np.asarray(x, dtype=float)
    if method == "intrinsic":
        return _frame_nabla(psi, psi.metric, psi.algebra, x, engine)
    if method != "gauss":
        raise ValueError(f"unknown method {method!r}")
    if psi.origin != "restricted":
        raise ValueError("the Gauss path needs a restricted spinor field")
    n = psi.dim
    ident = hypersurface_identification(n + 1)
    amb = ident.source
    E = orthonormal_frame(psi.metric, x)
    A = psi.ambient_frame(x)
    dA = tc.gradient(tc.derived(psi.ambient_frame, psi), x, engine)
    dirA = np.einsum("mk,mpa->kpa", E, dA)
    omega = np.einsum("kpa,pb->kab", dirA, A)
    omega = 0.5 * (omega - omega.transpose(0, 2, 1))
    uA = psi.ambient_components(x)
    duA = np.einsum("mk,md->kd", E, tc.gradient(tc.derived(psi.ambient_components, psi), x, engine))
    conn = _connection_matrices(amb, omega)
    ambient_nabla = duA + np.einsum("kab,b->ka", conn, uA)
    h = second_fundamental_form(psi.immersion)(x)
    hf = E.T @ h @ E
    ps = psi(x)
    shape = np.array([psi.algebra.vector(hf[:, k]) @ ps for k in range(n)])
    return ambient_nabla @ ident.matrix.T - 0.5 * shape


def spinor_covariant_derivative(psi, x, k: int, engine=None, method="intrinsic") -> np.ndarray:
    return covariant_derivatives(psi, x, engine, method)[k]


def dirac(psi: SpinorField, x, engine=None) -> np.ndarray:
    """``D psi = sum_k e_k . nabla_{e_k} psi``."""
    nab = covariant_derivatives(psi, x, engine)
    return np.einsum("kab,kb->a", psi.algebra.gammas, nab)


# ----------------------------------------------------------- restriction

def restrict_parallel_spinor(imm: Immersion, phi, engine=None) -> SpinorField:
    """Restrict the constant ambient spinor ``phi`` to the hypersurface.

    The adapted ambient frame is ``(dF e_1, ..., dF e_n, -nu)``; its rotation
    relative to the frame at the chart center is lifted to the spin group and
    the rotated components are mapped through the hypersurface identification.
    """
    engine = imm.engine if engine is None else engine
    n = imm.chart.dim
    ident = hypersurface_identification(n + 1)
    amb = ident.source
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (amb.spinor_dim,):
        raise ValueError(f"ambient spinor must have {amb.spinor_dim} components")
    if np.linalg.norm(phi) == 0:
        raise ValueError("ambient spinor must be nonzero")

    def frame(y):
        J = imm.jacobian(y)
        E = orthonormal_frame(lambda _: J.T @ J, y)
        A = np.column_stack([J @ E, -imm.normal(y)])
        if np.linalg.det(A) <= 0:
            raise OrientationError(f"adapted frame is negatively oriented at {y}")
        return A

    A_c = frame(imm.chart.center)
    phi_c = spin_lift(amb, A_c).conj().T @ phi
    if n % 2 and np.linalg.norm(ident.matrix @ phi_c) < 1e-8 * np.linalg.norm(phi):
        raise ValueError("ambient spinor has no positive-chirality component")

    def ambient(y):
        return amb.rotor(-so_log(A_c.T @ frame(y))) @ phi_c

    def fn(y):
        return ident.matrix @ ambient(y)

    return SpinorField(
        chart=imm.chart,
        metric=induced_metric(imm),
        algebra=clifford_algebra(n),
        fn=fn,
        origin="restricted",
        engine=engine,
        scale=float(np.linalg.norm(ident.matrix @ phi_c)),
        immersion=imm,
        ambient_spinor=phi,
        ambient_frame=tc.derived(frame, imm),
        ambient_components=tc.derived(ambient, imm),
    )


def gauss_formula_residual(imm: Immersion, phi, x, engine=None) -> float:
    """``max_k |nabla_{e_k} psi + 1/2 h(e_k) . psi|`` with the intrinsic connection."""
    psi = restrict_parallel_spinor(imm, phi, engine)
    x = np.asarray(x, dtype=float)
    nab = covariant_derivatives(psi, x)
    E = orthonormal_frame(psi.metric, x)
    hf = E.T @ second_fundamental_form(imm)(x) @ E
    ps = psi(x)
    out = [np.linalg.norm(nab[k] + 0.5 * psi.algebra.vector(hf[:, k]) @ ps) for k in range(psi.dim)]
    return float(max(out))


# ------------------------------------------------------- energy-momentum

@dataclass(frozen=True)
class EMTensor:
    """Energy-momentum tensor at a point: frame and coordinate components."""

    frame: np.ndarray
    coords: np.ndarray
    trace: float
    norm2: float


def energy_momentum(psi: SpinorField, x, engine=None, zero_threshold=None,
                    nabla=None) -> EMTensor:
    """``T(X, Y) = 1/2 Re <X . nabla_Y psi + Y . nabla_X psi, psi> / |psi|^2``."""
    x = np.asarray(x, dtype=float)
    ps = psi(x)
    norm2 = float(np.vdot(ps, ps).real)
    threshold = ZERO_THRESHOLD * psi.scale if zero_threshold is None else zero_threshold
    if np.sqrt(norm2) < threshold:
        raise ZeroSetError(f"|psi| = {np.sqrt(norm2):.3g} below zero threshold at {x}")
    nab = covariant_derivatives(psi, x, engine) if nabla is None else nabla
    # M[i, j] = Re <e_i . nabla_j psi, psi>
    M = np.einsum("iab,jb,a->ij", psi.algebra.gammas, nab, ps.conj()).real
    T = 0.5 * (M + M.T) / norm2
    E = orthonormal_frame(psi.metric, x)
    Einv = np.linalg.inv(E)
    return EMTensor(T, Einv.T @ T @ Einv, float(np.trace(T)), float(np.sum(T * T)))


def em_tensor_field(psi: SpinorField, engine=None) -> SymTensorField:
    """``T^psi`` as a coordinate symmetric-tensor field."""
    return SymTensorField(psi.chart, lambda y: energy_momentum(psi, y, engine).coords)


def _clifford_vector_action(alg, V, ps):
    """``V[:, k] . ps`` for every column ``k``."""
    return np.einsum("iab,ik,b->ka", alg.gammas, V, ps)


def t_killing_residual(psi: SpinorField, x, engine=None) -> float:
    """``max_k |nabla_{e_k} psi + T(e_k) . psi| / |psi|``."""
    x = np.asarray(x, dtype=float)
    nab = covariant_derivatives(psi, x, engine)
    T = energy_momentum(psi, x, engine, nabla=nab).frame
    ps = psi(x)
    res = nab + _clifford_vector_action(psi.algebra, T, ps)
    return float(np.linalg.norm(res, axis=1).max() / np.linalg.norm(ps))


def trace_identities(psi: SpinorField, samples, engine=None) -> dict:
    """Traced identities of the equality case over a sample set.

    Keys: ``max_trace_defect`` (``|(tr T)^2 - (S/4 + |T|^2)|``),
    ``trace_sq_spread``, ``max_divergence`` and the raw per-sample arrays.
    """
    engine = _engine(psi, engine)
    trace_sq, integrand, div = [], [], []
    Tfield = em_tensor_field(psi, engine)
    for x in np.atleast_2d(samples):
        em = energy_momentum(psi, x, engine)
        S = tc.scalar_curvature(psi.metric, x, engine)
        trace_sq.append(em.trace ** 2)
        integrand.append(0.25 * S + em.norm2)
        div.append(np.linalg.norm(tc.divergence_symtensor(Tfield, psi.metric, x, engine)))
    trace_sq = np.array(trace_sq)
    integrand = np.array(integrand)
    return {
        "max_trace_defect": float(np.abs(trace_sq - integrand).max()),
        "trace_sq_spread": float(trace_sq.max() - trace_sq.min()),
        "max_divergence": float(max(div)),
        "trace_sq": trace_sq,
        "integrand": integrand,
    }


def hijazi_integrand(psi: SpinorField, x, engine=None) -> float:
    """``S/4 + |T^psi|^2``."""
    engine = _engine(psi, engine)
    em = energy_momentum(psi, x, engine)
    return 0.25 * tc.scalar_curvature(psi.metric, x, engine) + em.norm2


def friedrich_integrand(g, x, engine=tc.DEFAULT_ENGINE) -> float:
    """``n S / (4 (n - 1))``; undefined in dimension one."""
    n = np.asarray(x).size
    if n < 2:
        raise ValueError("the Friedrich integrand needs dimension >= 2")
    return n * tc.scalar_curvature(g, x, engine) / (4.0 * (n - 1))


# --------------------------------------------------------- Killing vector

def killing_vector(psi: SpinorField, x, engine=None, return_imag: bool = False):
    """Frame components of ``V`` with ``g(V, X) = i <psi, T(X) . psi>``."""
    x = np.asarray(x, dtype=float)
    ps = psi(x)
    T = energy_momentum(psi, x, engine).frame
    acted = _clifford_vector_action(psi.algebra, T, ps)
    vals = np.array([1j * np.vdot(acted[a], ps) for a in range(psi.dim)])
    if return_imag:
        return vals.real, float(np.abs(vals.imag).max())
    return vals.real


def killing_defect(psi: SpinorField, x, engine=None) -> np.ndarray:
    """Frame components of ``1/2 (g(nabla_i V, e_j) + g(nabla_j V, e_i))``."""
    engine = _engine(psi, engine)
    x = np.asarray(x, dtype=float)
    g = psi.metric

    def lowered(y):
        E = orthonormal_frame(g, y)
        return g(y) @ E @ killing_vector(psi, y, engine)

    Vl = tc.derived(lowered, psi)
    D = tc.gradient(Vl, x, engine) - np.einsum("lij,l->ij", tc.christoffel(g, x, engine), Vl(x))
    E = orthonormal_frame(g, x)
    return E.T @ (0.5 * (D + D.T)) @ E


# ------------------------------------------------- curvature identities

def _require_tkilling(psi, x, engine):
    res = t_killing_residual(psi, x, engine)
    if res > TKILLING_TOL:
        raise PreconditionError(f"spinor is not T-Killing at {x} (residual {res:.3g})", res)


def _frame_riemann(g, x, engine, E):
    """``Rf[a, b, i, j] = g(R(e_i, e_j) e_a, e_b)``."""
    R = tc.riemann(g, x, engine)
    gE = np.asarray(g(x)) @ E
    return np.einsum("lkpq,pi,qj,ka,lb->abij", R, E, E, E, gE)


@dataclass(frozen=True)
class SpinorCurvature:
    """Spinorial curvature ``R(e_i, e_j) psi`` computed three ways.

    ``from_derivatives`` nests covariant derivatives, ``from_riemann`` acts
    with the Riemann tensor, ``closed_form`` is the T-Killing expression
    in terms of ``T`` and ``nabla T``.  Axes: ``[i, j, spinor]``.
    """

    from_derivatives: np.ndarray
    from_riemann: np.ndarray
    closed_form: np.ndarray
    psi_norm: float


def spinor_curvature(psi: SpinorField, x, engine=None) -> SpinorCurvature:
    engine = _engine(psi, engine)
    x = np.asarray(x, dtype=float)
    g, alg, n = psi.metric, psi.algebra, psi.dim
    E = orthonormal_frame(g, x)
    ps = psi(x)

    nab_field = tc.derived(lambda y: covariant_derivatives(psi, y, engine), psi)
    nab = nab_field(x)
    second = _frame_nabla(nab_field, g, alg, x, engine)  # second[i, j] = nabla_{e_i}(nabla_{e_j} psi)
    dE = tc.gradient(frame_field(g), x, engine)
    brk = np.einsum("mi,mpj->ijp", E, dE) - np.einsum("mj,mpi->ijp", E, dE)
    brk_frame = np.einsum("cp,ijp->ijc", np.linalg.inv(E), brk)
    from_derivatives = second - second.transpose(1, 0, 2) - np.einsum("ijc,cd->ijd", brk_frame, nab)

    Rf = _frame_riemann(g, x, engine, E)
    from_riemann = np.array([[alg.bivector(Rf[:, :, i, j]) @ ps for j in range(n)] for i in range(n)])

    Tfield = em_tensor_field(psi, engine)
    T = E.T @ Tfield(x) @ E
    nT = np.einsum("kpq,ki,pa,qb->iab", tc.covariant_derivative_symtensor(Tfield, g, x, engine), E, E, E)
    TV = _clifford_vector_action(alg, T, ps)  # TV[k] = T(e_k) . psi
    closed = np.empty_like(from_riemann)
    for i in range(n):
        for j in range(n):
            quad = alg.vector(T[:, j]) @ TV[i] - alg.vector(T[:, i]) @ TV[j]
            lin = alg.vector(nT[j, i] - nT[i, j]) @ ps
            closed[i, j] = quad + lin
    return SpinorCurvature(from_derivatives, from_riemann, closed, float(np.linalg.norm(ps)))


def curvature_action_residual(psi: SpinorField, x, engine=None, check=True) -> float:
    """Largest deviation between the three evaluations of ``R(e_i, e_j) psi``,
    relative to ``|psi|``."""
    engine = _engine(psi, engine)
    if check:
        _require_tkilling(psi, x, engine)
    sc = spinor_curvature(psi, x, engine)
    worst = max(
        np.abs(sc.from_riemann - sc.closed_form).max(),
        np.abs(sc.from_derivatives - sc.closed_form).max(),
        np.abs(sc.from_derivatives - sc.from_riemann).max(),
    )
    return float(worst / sc.psi_norm)


@dataclass(frozen=True)
class RicciIdentity:
    """Three sides of the Ricci identity for a T-Killing spinor, axis 0 = ``X = e_k``."""

    ricci_action: np.ndarray
    curvature_trace: np.ndarray
    closed_form: np.ndarray
    psi_norm: float


def ricci_identity(psi: SpinorField, x, engine=None) -> RicciIdentity:
    engine = _engine(psi, engine)
    x = np.asarray(x, dtype=float)
    g, alg, n = psi.metric, psi.algebra, psi.dim
    E = orthonormal_frame(g, x)
    ps = psi(x)
    cur = tc.curvature(g, x, engine)
    Ric = E.T @ cur.ricci @ E
    lhs = _clifford_vector_action(alg, Ric, ps)
    Rf = _frame_riemann(g, x, engine, E)
    mid = np.array([
        2.0 * sum(alg.gammas[i] @ alg.bivector(Rf[:, :, i, k]) @ ps for i in range(n))
        for k in range(n)
    ])
    Tfield = em_tensor_field(psi, engine)
    T = E.T @ Tfield(x) @ E
    nT = np.einsum("kpq,ki,pa,qb->iab", tc.covariant_derivative_symtensor(Tfield, g, x, engine), E, E, E)
    rhs = (4.0 * np.trace(T) * _clifford_vector_action(alg, T, ps)
           - 4.0 * _clifford_vector_action(alg, T @ T, ps))
    for k in range(n):
        rhs[k] -= 2.0 * sum(alg.gammas[i] @ alg.vector(nT[i, k]) @ ps for i in range(n))
    return RicciIdentity(lhs, mid, rhs, float(np.linalg.norm(ps)))


def ricci_identity_residual(psi: SpinorField, x, engine=None, check=True) -> float:
    """``max_k`` of both deviations from ``Ric(e_k) . psi``, relative to ``|psi|``."""
    engine = _engine(psi, engine)
    if check:
        _require_tkilling(psi, x, engine)
    ri = ricci_identity(psi, x, engine)
    worst = max(np.abs(ri.ricci_action - ri.curvature_trace).max(),
                np.abs(ri.ricci_action - ri.closed_form).max())
    return float(worst / ri.psi_norm)
