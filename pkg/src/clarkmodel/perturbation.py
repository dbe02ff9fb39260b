"""The rank-one perturbation family ``U_gamma`` for atomic measures.

In ``L^2(mu)`` with ``mu = sum m_k delta_{xi_k}`` we use the orthonormal
basis ``e_k = 1_{xi_k} / sqrt(m_k)``.  There ``U_1`` is ``diag(xi_k)``,
``b = (sqrt(m_k))`` is the constant function one and ``b_1 = U_1^* b``.
Then ``U_gamma = U_1 + (gamma - 1) b b_1^*``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .charfunc import NumericalCheckError, _psd_sqrt
from .measure import CircleMeasure, MeasureError

#: eigenvalues closer than this are treated as a multiple eigenvalue
EIG_GAP = 1e-10


class NonCyclicError(ValueError):
    """Raised when a unitary member has a repeated eigenvalue."""


@dataclass(frozen=True)
class PerturbationMatrix:
    """``U_gamma`` in the orthonormal atom basis of ``L^2(mu)``."""

    mu: CircleMeasure
    gamma: complex
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def b(self) -> np.ndarray:
        return np.sqrt(self.mu.masses).astype(complex)

    @property
    def b1(self) -> np.ndarray:
        return np.conj(self.mu.atoms) * np.sqrt(self.mu.masses)

    @property
    def is_unitary_member(self) -> bool:
        return abs(abs(self.gamma) - 1) <= 1e-10


def build_U_gamma(mu: CircleMeasure, gamma) -> PerturbationMatrix:
    """Matrix ``xi_k delta_jk + (gamma - 1) sqrt(m_j m_k) xi_k``."""
    if not mu.is_atomic or mu.n_atoms == 0:
        raise MeasureError("U_gamma is built only for purely atomic measures")
    mu.require_probability()
    g = complex(gamma)
    if abs(g) > 1 + 1e-10:
        raise ValueError("|gamma| must be <= 1")
    xi = mu.atoms
    s = np.sqrt(mu.masses)
    U = np.diag(xi) + (g - 1) * np.outer(s, s) * xi[None, :]
    if g == 1:
        U = np.diag(xi)
    U.setflags(write=False)
    p = PerturbationMatrix(mu, g, U)
    _check_contraction(p)
    return p


def _check_contraction(p: PerturbationMatrix) -> None:
    U = p.matrix
    if p.is_unitary_member:
        r = np.linalg.norm(U.conj().T @ U - np.eye(p.n))
        if r > 1e-10:
            raise NumericalCheckError("U_alpha not unitary: %.3g" % r)
    else:
        s = np.linalg.norm(U, 2)
        if s > 1 + 1e-10:
            raise NumericalCheckError("U_gamma not a contraction: %.3g" % s)


def defect_operators(p: PerturbationMatrix) -> tuple[np.ndarray, np.ndarray]:
    """``D = (I - U^*U)^{1/2}`` and ``D_* = (I - U U^*)^{1/2}``.

    Checked against ``sqrt(1-|g|^2) b_1 b_1^*`` and ``sqrt(1-|g|^2) b b^*``.
    """
    U = p.matrix
    n = p.n
    D = _psd_sqrt(np.eye(n) - U.conj().T @ U)
    Ds = _psd_sqrt(np.eye(n) - U @ U.conj().T)
    k = np.sqrt(max(0.0, 1 - abs(p.gamma) ** 2))
    err = max(
        np.max(np.abs(D - k * np.outer(p.b1, p.b1.conj()))),
        np.max(np.abs(Ds - k * np.outer(p.b, p.b.conj()))),
    )
    if err > 1e-9:
        raise NumericalCheckError("defect operators disagree with closed form by %.3g" % err)
    return D, Ds


def spectral_measure(p: PerturbationMatrix) -> CircleMeasure:
    """Spectral measure of the unitary ``U_alpha`` for the vector ``b``.

    Atoms are the eigenvalues (from a complex Schur form, which is diagonal
    for a normal matrix) and masses are ``|<b, v_k>|^2``.
    """
    if not p.is_unitary_member:
        raise ValueError("spectral_measure needs |gamma| = 1")
    T, Z = scipy.linalg.schur(p.matrix, output="complex")
    ev = np.diag(T)
    masses = np.abs(Z.conj().T @ p.b) ** 2
    ang = np.mod(np.angle(ev), 2 * np.pi)
    o = np.argsort(ang)
    ang, masses = ang[o], masses[o]
    if ang.size > 1:
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        if gaps.min() < EIG_GAP:
            raise NonCyclicError("repeated eigenvalue (gap %.3g); b is not cyclic" % gaps.min())
    tot = masses.sum()
    if abs(tot - 1) > 1e-10:
        raise NumericalCheckError("spectral masses sum to %r" % tot)
    return CircleMeasure(ang, masses)


def krylov_min_singular(p: PerturbationMatrix) -> float:
    """Smallest singular value of the Krylov matrix ``[b, U b, ..., U^{n-1} b]``.

    Meaningful for small ``n`` only; the Krylov matrix of a unitary is a
    scaled Vandermonde matrix and its conditioning decays quickly with ``n``.
    """
    U = p.matrix
    n = p.n
    K = np.empty((n, n), dtype=complex)
    v = p.b.copy()
    for k in range(n):
        K[:, k] = v
        v = U @ v
    return float(np.linalg.svd(K, compute_uv=False)[-1])


def arnoldi_min_subdiagonal(p: PerturbationMatrix) -> float:
    """Smallest Arnoldi subdiagonal ``h_{k+1,k}`` started from ``b``.

    Nonzero for every ``k < n`` exactly when ``b`` is cyclic.  Each value
    measures one new Krylov direction after orthogonalization, so it is a
    milder test than the singular values of the raw Krylov matrix.
    """
    U = p.matrix
    n = p.n
    Q = np.zeros((n, n), dtype=complex)
    Q[:, 0] = p.b / np.linalg.norm(p.b)
    hmin = 1.0
    for k in range(n - 1):
        w = U @ Q[:, k]
        for _ in range(2):  # re-orthogonalize
            w = w - Q[:, : k + 1] @ (Q[:, : k + 1].conj().T @ w)
        h = np.linalg.norm(w)
        hmin = min(hmin, h)
        if h == 0:
            break
        Q[:, k + 1] = w / h
    return float(hmin)


def spectral_radius(p: PerturbationMatrix) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(p.matrix))))


def spectral_representation(p: PerturbationMatrix) -> tuple[CircleMeasure, np.ndarray]:
    """Spectral measure and unitary eigenvector matrix ``Z`` of ``U_alpha``.

    Eigenvector phases are fixed so that ``Z^H b`` is positive; then ``Z^H``
    maps ``L^2(mu)`` onto ``L^2(mu_alpha)`` (atom basis) sending ``b`` to the
    constant one and ``U_alpha`` to multiplication by the atoms.
    """
    mu_a = spectral_measure(p)
    T, Z = scipy.linalg.schur(p.matrix, output="complex")
    ang = np.mod(np.angle(np.diag(T)), 2 * np.pi)
    Z = Z[:, np.argsort(ang)]
    proj = Z.conj().T @ p.b
    Z = Z * (proj / np.abs(proj))[None, :]
    return mu_a, Z
