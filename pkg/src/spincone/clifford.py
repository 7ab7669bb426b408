"""Complex Clifford algebras in a gamma-matrix representation.

Conventions (see ``docs/CONVENTIONS.md``):

* ``gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij``, every gamma is
  skew-Hermitian, so Clifford multiplication by a real vector is skew for the
  standard Hermitian product.
* The Hermitian product ``<a, b> = sum a_k conj(b_k)`` is conjugate-linear in
  the second slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg

from .errors import IntertwiningError

MAX_DIM = 9

_I2 = np.eye(2, dtype=complex)
_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


@dataclass(frozen=True, eq=False)
class CliffordAlgebra:
    """Gamma matrices ``gammas[i]`` for an ``n``-dimensional Euclidean space."""

    n: int
    gammas: np.ndarray

    @property
    def spinor_dim(self) -> int:
        return self.gammas.shape[1]

    def vector(self, v) -> np.ndarray:
        """Matrix of Clifford multiplication by ``v`` (orthonormal components)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected {self.n} components, got shape {v.shape}")
        return np.tensordot(v, self.gammas, axes=1)

    def bivector(self, B) -> np.ndarray:
        """``1/4 sum_ij B[i, j] gamma_i gamma_j``.

        With ``B[i, j] = g(nabla e_i, e_j)`` this is the spin lift of a
        connection form; with ``B = -generator`` it is the lift of ``expm``.
        """
        B = np.asarray(B, dtype=float)
        return 0.25 * np.einsum("ij,iab,jbc->ac", B, self.gammas, self.gammas)

    def rotor(self, generator) -> np.ndarray:
        """Spin lift of ``expm(generator)`` for a real antisymmetric generator.

        The result ``S`` satisfies ``S gamma_k S^-1 = sum_l R[l, k] gamma_l``.
        """
        return scipy.linalg.expm(-self.bivector(generator))


@lru_cache(maxsize=None)
def clifford_algebra(n: int) -> CliffordAlgebra:
    """Deterministic Jordan-Wigner representation of dimension ``2**(n//2)``."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_DIM:
        raise ValueError(f"Clifford dimension must be an integer in [1, {MAX_DIM}], got {n!r}")
    m = n // 2
    hermitian = []
    for j in range(m):
        head = [_S3] * j
        tail = [_I2] * (m - j - 1)
        hermitian.append(_kron_all(head + [_S1] + tail))
        hermitian.append(_kron_all(head + [_S2] + tail))
    if n % 2:
        # Sign chosen so that the positive half-spinors of dimension n + 1
        # carry the same representation (checked in hypersurface_identification).
        hermitian.append(-_kron_all([_S3] * m))
    gammas = 1j * np.array(hermitian)
    gammas.setflags(write=False)
    return CliffordAlgebra(n=n, gammas=gammas)


def clifford_multiply(alg: CliffordAlgebra, v, psi) -> np.ndarray:
    """``v . psi`` for a tangent vector given in orthonormal components."""
    return alg.vector(v) @ np.asarray(psi, dtype=complex)


def hermitian(a, b) -> complex:
    """Hermitian product, conjugate-linear in the second argument."""
    return complex(np.vdot(b, a))


def relation_residual(alg: CliffordAlgebra) -> float:
    """Largest deviation from the defining relations and skew-Hermiticity."""
    g = alg.gammas
    eye = np.eye(alg.spinor_dim)
    worst = 0.0
    for i in range(alg.n):
        worst = max(worst, np.abs(g[i] + g[i].conj().T).max())
        for j in range(alg.n):
            target = -2.0 * (i == j) * eye
            worst = max(worst, np.abs(g[i] @ g[j] + g[j] @ g[i] - target).max())
    return float(worst)


@dataclass(frozen=True, eq=False)
class VolumeElement:
    """Complex volume element and its chirality projectors."""

    matrix: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    central: bool


def volume_element(alg: CliffordAlgebra) -> VolumeElement:
    """``i**((n+1)//2) gamma_1 ... gamma_n`` with projectors ``(1 +- omega)/2``.

    For odd ``n`` the element is central (a multiple of the identity in this
    irreducible representation) and ``central`` is set.
    """
    n = alg.n
    prod = reduce(np.matmul, alg.gammas, np.eye(alg.spinor_dim, dtype=complex))
    omega = (1j ** ((n + 1) // 2)) * prod
    eye = np.eye(alg.spinor_dim)
    return VolumeElement(
        matrix=omega,
        plus=0.5 * (eye + omega),
        minus=0.5 * (eye - omega),
        central=bool(n % 2),
    )


@dataclass(frozen=True, eq=False)
class Identification:
    """Isometry from ambient spinors (or their positive half) to intrinsic ones.

    ``matrix`` has shape ``(target.spinor_dim, source.spinor_dim)``; for odd
    hypersurface dimension it annihilates the negative half-spinors.
    ``domain`` is an orthonormal basis (columns) of the space on which it is
    an isometry.
    """

    source: CliffordAlgebra
    target: CliffordAlgebra
    matrix: np.ndarray
    domain: np.ndarray

    def __call__(self, psi) -> np.ndarray:
        return self.matrix @ np.asarray(psi, dtype=complex)

    def induced_multiplication(self, a: int) -> np.ndarray:
        """Ambient ``e_a . nu .`` for the distinguished normal ``nu = e_{n+1}``."""
        g = self.source.gammas
        return g[a] @ g[self.source.n - 1]


def intertwining_residual(ident: Identification) -> float:
    """``max_i,psi |iota(e_i . nu . psi) - e_i . iota(psi)|`` over basis spinors."""
    worst = 0.0
    basis = ident.domain
    for a in range(ident.target.n):
        lhs = ident.matrix @ ident.induced_multiplication(a) @ basis
        rhs = ident.target.gammas[a] @ ident.matrix @ basis
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


@lru_cache(maxsize=None)
def hypersurface_identification(ambient_dim: int) -> Identification:
    """Solve and freeze the spinor identification for a hypersurface.

    The intertwiner is the null vector of the linear constraints
    ``X B_a = gamma_a X``; it is normalised to an isometry and given a fixed
    global phase, then verified.
    """
    if not 2 <= ambient_dim <= MAX_DIM:
        raise ValueError(f"ambient dimension must lie in [2, {MAX_DIM}], got {ambient_dim}")
    source = clifford_algebra(ambient_dim)
    target = clifford_algebra(ambient_dim - 1)
    n = target.n
    if n % 2 == 0:
        domain = np.eye(source.spinor_dim, dtype=complex)
    else:
        vol = volume_element(source)
        w, v = np.linalg.eigh(vol.matrix)
        domain = v[:, w > 0]
    blocks = []
    d_t, d_s = target.spinor_dim, domain.shape[1]
    nu = source.gammas[n]
    for a in range(n):
        restricted = domain.conj().T @ source.gammas[a] @ nu @ domain
        # vec(X B) = (B^T kron I) vec(X), vec(G X) = (I kron G) vec(X), column major
        blocks.append(np.kron(restricted.T, np.eye(d_t)) - np.kron(np.eye(d_s), target.gammas[a]))
    system = np.vstack(blocks)
    _, sing, vh = np.linalg.svd(system)
    if sing[-1] > 1e-10 or (len(sing) > 1 and sing[-2] < 1e-8):
        raise IntertwiningError(
            f"no unique intertwiner for ambient dimension {ambient_dim} "
            f"(smallest singular values {sing[-2:]})"
        )
    core = vh[-1].conj().reshape((d_s, d_t)).T
    core = core / np.sqrt(np.real(np.trace(core.conj().T @ core)) / d_s)
    flat = core.ravel()
    pivot = flat[np.argmax(np.abs(flat) > np.abs(flat).max() - 1e-12)]
    core = core * (abs(pivot) / pivot)
    matrix = core @ domain.conj().T
    ident = Identification(source=source, target=target, matrix=matrix, domain=domain)
    for a in range(n):
        lhs = ident.matrix @ ident.induced_multiplication(a) @ domain
        rhs = target.gammas[a] @ ident.matrix @ domain
        if np.abs(lhs - rhs).max() > 1e-13:
            raise IntertwiningError(f"intertwining fails for direction {a}", index=a)
    return ident


def so_log(R) -> np.ndarray:
    """Principal real logarithm of a rotation matrix, via the real Schur form.

    Rotation angles are taken in ``(-pi, pi]``; at angle ``pi`` the branch is
    arbitrary but fixed.
    """
    R = np.asarray(R, dtype=float)
    T, Z = scipy.linalg.schur(R, output="real")
    N = R.shape[0]
    L = np.zeros_like(T)
    negatives = []
    i = 0
    while i < N:
        if i + 1 < N and abs(T[i + 1, i]) > 1e-13:
            c = 0.5 * (T[i, i] + T[i + 1, i + 1])
            s = 0.5 * (T[i + 1, i] - T[i, i + 1])
            a = np.arctan2(s, c)
            L[i + 1, i], L[i, i + 1] = a, -a
            i += 2
        else:
            if T[i, i] < 0:
                negatives.append(i)
            i += 1
    if len(negatives) % 2:
        raise ValueError("matrix is not a proper rotation")
    for p, q in zip(negatives[::2], negatives[1::2]):
        L[q, p], L[p, q] = np.pi, -np.pi
    B = Z @ L @ Z.T
    return 0.5 * (B - B.T)


def spin_lift(alg: CliffordAlgebra, R) -> np.ndarray:
    """A spin lift of ``R`` in SO(n), continuous where ``-1`` is not an eigenvalue."""
    return alg.rotor(so_log(R))
