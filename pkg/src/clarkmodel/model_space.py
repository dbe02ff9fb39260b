"""The model space ``K_theta = H^2 - theta H^2`` of a finite Blaschke product.

The space is carried by the Takenaka-Malmquist basis

    phi_k(z) = sqrt(1-|a_k|^2)/(1 - conj(a_k) z) * prod_{j<k} b_{a_j}(z),

orthonormal for any zero list (repeated zeros included).  Inner products
are computed by the trapezoid rule on ``N`` equispaced points of the
circle.  Integrands are rational with poles at ``1/conj(a_k)``, so the
aliasing error is of order ``max|a_k|**N``; when ``N`` is not given it is
chosen from the zero closest to the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .charfunc import RationalInner
from .measure import grid_points

#: tolerance of the Gram matrix test
GRAM_TOL = 1e-9
#: largest automatic quadrature size
MAX_QUAD = 2**20


class QuadratureResolutionError(RuntimeError):
    """The quadrature grid does not resolve the basis functions."""


def tm_basis(zeros: np.ndarray, z) -> np.ndarray:
    """Takenaka-Malmquist functions at ``z``; shape ``(len(zeros),) + z.shape``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((len(zeros),) + z.shape, dtype=complex)
    B = np.ones(z.shape, dtype=complex)
    for k, a in enumerate(zeros):
        ca = np.conj(a)
        out[k] = np.sqrt(1 - abs(a) ** 2) / (1 - ca * z) * B
        B = B * (z - a) / (1 - ca * z)
    return out


def _next_pow2(x: float) -> int:
    return 1 << max(0, int(np.ceil(np.log2(max(x, 1.0)))))


def minimal_quad_size(n: int) -> int:
    return _next_pow2(max(1024, 32 * n))


def auto_quad_size(theta: RationalInner) -> int:
    """Power of two ``N >= max(1024, 32 n)`` with ``max|a|**N`` below ``1e-17``."""
    n = theta.degree
    rho = float(np.max(np.abs(theta.zeros))) if n else 0.0
    need = 40.0 / max(1 - rho, 1e-300)
    return max(minimal_quad_size(n), _next_pow2(need))


@dataclass(frozen=True)
class ModelSpace:
    """``K_theta`` with its TM basis sampled on the quadrature grid.

    Attributes
    ----------
    theta : RationalInner
    quad_size : int
    nodes : ndarray, shape (N,)
    samples : ndarray, shape (n, N)
        ``samples[k, j] = phi_k(nodes[j])``.
    compression : ndarray, shape (n, n)
        ``<z phi_j, phi_i>``, the matrix of ``P_theta M_z``.
    gram_residual : float
    """

    theta: RationalInner
    quad_size: int
    nodes: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    compression: np.ndarray
    gram_residual: float

    @property
    def dim(self) -> int:
        return self.theta.degree

    def basis(self, z) -> np.ndarray:
        return tm_basis(self.theta.zeros, z)

    def inner(self, f_samples: np.ndarray, g_samples: np.ndarray) -> complex:
        """``<f, g>`` in ``L^2(m)`` from grid samples (linear in ``f``)."""
        return complex(np.mean(f_samples * np.conj(g_samples)))

    def coefficients(self, f_samples: np.ndarray) -> np.ndarray:
        """``<f, phi_k>`` for every basis function."""
        return self.samples.conj() @ np.asarray(f_samples, dtype=complex) / self.quad_size

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Grid samples of ``sum_k coeffs_k phi_k``."""
        return np.asarray(coeffs, dtype=complex) @ self.samples

    def evaluate(self, coeffs: np.ndarray, z) -> np.ndarray:
        """``sum_k coeffs_k phi_k(z)`` at arbitrary points."""
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.basis(z), axes=1)

    def sample(self, f: Union[Callable, np.ndarray]) -> np.ndarray:
        if callable(f):
            return np.asarray(f(self.nodes), dtype=complex) * np.ones(self.quad_size)
        f = np.asarray(f, dtype=complex)
        if f.shape != (self.quad_size,):
            raise ValueError("grid function has %d samples, model grid has %d" % (f.size, self.quad_size))
        return f


def build_model(theta: RationalInner, quad_size: Optional[int] = None) -> ModelSpace:
    """Build ``K_theta`` and the compression of ``M_z``.

    Parameters
    ----------
    theta : RationalInner
        Blaschke product of degree ``n >= 1``.
    quad_size : int, optional
        Power of two, at least ``max(1024, 32 n)``.  Chosen from the zeros
        when omitted.

    Raises
    ------
    QuadratureResolutionError
        If the Gram matrix deviates from the identity by more than 1e-9.
    """
    n = theta.degree
    if n < 1:
        raise ValueError("model space needs degree >= 1")
    if quad_size is None:
        N = auto_quad_size(theta)
        if N > MAX_QUAD:
            raise QuadratureResolutionError(
                "zeros within %.3g of the circle need N = %d > %d" % (1 - np.abs(theta.zeros).max(), N, MAX_QUAD)
            )
    else:
        N = int(quad_size)
        if N & (N - 1) or N < minimal_quad_size(n):
            raise ValueError("quad_size must be a power of two >= %d" % minimal_quad_size(n))
    z = grid_points(N)
    S = tm_basis(theta.zeros, z)
    G = S @ S.conj().T / N  # G[i, j] = <phi_i, phi_j>
    gram = float(np.max(np.abs(G - np.eye(n))))
    if gram > GRAM_TOL:
        raise QuadratureResolutionError("Gram deviation %.3g at N = %d" % (gram, N))
    M = S.conj() @ (z * S).T / N  # M[i, j] = <z phi_j, phi_i>
    for a in (z, S, M):
        a.setflags(write=False)
    return ModelSpace(theta, N, z, S, M, gram)


def project(ms: ModelSpace, f) -> tuple[np.ndarray, float]:
    """Coefficients ``<f, phi_k>`` and the reconstruction residual ``||f - P f||``.

    ``f`` is a callable of the circle variable or an array of grid samples.
    """
    fs = ms.sample(f)
    c = ms.coefficients(fs)
    res = float(np.sqrt(np.mean(np.abs(fs - ms.synthesize(c)) ** 2)))
    return c, res


def compression_power_residual(ms: ModelSpace, kmax: Optional[int] = None) -> float:
    """``max_k || M^k - P_theta M_z^k ||`` over ``k <= kmax`` (default ``2 n``)."""
    kmax = 2 * ms.dim if kmax is None else kmax
    M = ms.compression
    Mk = np.eye(ms.dim, dtype=complex)
    zk = np.ones(ms.quad_size, dtype=complex)
    worst = 0.0
    for _ in range(kmax):
        Mk = M @ Mk
        zk = zk * ms.nodes
        direct = ms.samples.conj() @ (zk * ms.samples).T / ms.quad_size
        worst = max(worst, float(np.max(np.abs(Mk - direct))))
    return worst


# ---------------------------------------------------------------------------
# defect vectors


@dataclass(frozen=True)
class DefectVectors:
    """Unit defect vectors ``c``, ``c1`` of the model operator.

    ``c = (1-|t0|^2)^{-1/2} (1 - conj(t0) theta)`` and
    ``c1 = (1-|t0|^2)^{-1/2} (theta - t0)/z`` with ``t0 = theta(0)``.
    ``c2`` is the function ``z c1(z)``.
    """

    c: np.ndarray
    c1: np.ndarray
    c2: Callable = field(repr=False)
    residuals: dict = field(default_factory=dict)


def defect_vectors(ms: ModelSpace) -> DefectVectors:
    """Project ``c`` and ``c1`` onto the basis and verify the defect relations."""
    th = ms.theta
    t0 = th(0.0)
    s = np.sqrt(1 - abs(t0) ** 2)
    c, rc = project(ms, lambda z: (1 - np.conj(t0) * th(z)) / s)
    c1, rc1 = project(ms, lambda z: (th(z) - t0) / (z * s))
    M = ms.compression
    I = np.eye(ms.dim)
    res = {
        "c_membership": rc,
        "c1_membership": rc1,
        "c_norm": abs(np.linalg.norm(c) - 1),
        "c1_norm": abs(np.linalg.norm(c1) - 1),
        "Mc1": float(np.max(np.abs(M @ c1 + t0 * c))),
        # I - M M^* = (1-|t0|^2) c c^*  and  I - M^* M = (1-|t0|^2) c1 c1^*
        "range_c": float(np.max(np.abs(I - M @ M.conj().T - s**2 * np.outer(c, c.conj())))),
        "range_c1": float(np.max(np.abs(I - M.conj().T @ M - s**2 * np.outer(c1, c1.conj())))),
    }
    c2 = lambda z: z * ms.evaluate(c1, z)  # noqa: E731
    return DefectVectors(c, c1, c2, res)


# ---------------------------------------------------------------------------
# de Branges-Rovnyak transcription


def weight_pinv(theta_samples: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Pointwise Moore-Penrose inverse of ``[[1, theta], [conj(theta), 1]]``.

    Returns an array of shape ``(N, 2, 2)``.
    """
    t = np.asarray(theta_samples, dtype=complex)
    W = np.empty(t.shape + (2, 2), dtype=complex)
    W[..., 0, 0] = 1
    W[..., 1, 1] = 1
    W[..., 0, 1] = t
    W[..., 1, 0] = np.conj(t)
    lam, V = np.linalg.eigh(W)
    inv = np.where(lam > tol, 1.0 / np.where(lam > tol, lam, 1.0), 0.0)
    return np.einsum("...ik,...k,...jk->...ij", V, inv, V.conj())


def frequency_content(samples: np.ndarray, side: str) -> float:
    """Relative l2 mass of the negative (``side="negative"``) or nonnegative
    (``side="nonnegative"``) Fourier coefficients of grid samples."""
    n = samples.size
    c = np.fft.fft(samples) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    tot = np.linalg.norm(c)
    if tot == 0:
        return 0.0
    sel = k < 0 if side == "negative" else k >= 0
    return float(np.linalg.norm(c[sel]) / tot)


@dataclass(frozen=True)
class DeBrangesPair:
    """Boundary functions ``(g_+, g_-)`` of a model-space element on a grid."""

    g_plus: np.ndarray
    g_minus: np.ndarray
    norm_residual: float
    plus_negative_content: float
    minus_nonnegative_content: float

    def is_member(self, tol: float = 1e-8) -> bool:
        return self.plus_negative_content < tol and self.minus_nonnegative_content < tol


def debranges_pair(theta_samples, g1, g2, delta_samples=None) -> DeBrangesPair:
    """Transcription ``(g_1, g_2) -> (g_+, g_-) = (g_1, conj(theta) g_1 + Delta g_2)``.

    The norm residual compares ``||(g_1, g_2)||`` in ``L^2`` with the norm
    of ``(g_+, g_-)`` weighted by the pseudo-inverse of the defect weight.
    """
    t = np.asarray(theta_samples, dtype=complex)
    g1 = np.asarray(g1, dtype=complex)
    g2 = np.zeros_like(g1) if g2 is None else np.asarray(g2, dtype=complex)
    d = np.sqrt(np.clip(1 - np.abs(t) ** 2, 0, 1)) if delta_samples is None else np.asarray(delta_samples)
    gp = g1
    gm = np.conj(t) * g1 + d * g2
    v = np.stack([gp, gm], axis=-1)
    Wp = weight_pinv(t)
    nrm_w = np.real(np.mean(np.einsum("...i,...ij,...j->...", v.conj(), Wp, v)))
    nrm = np.mean(np.abs(g1) ** 2 + np.abs(g2) ** 2)
    return DeBrangesPair(
        gp,
        gm,
        float(abs(nrm_w - nrm)),
        frequency_content(gp, "negative"),
        frequency_content(gm, "nonnegative"),
    )


def to_debranges(ms: ModelSpace, g_coeffs: np.ndarray) -> DeBrangesPair:
    """de Branges-Rovnyak pair of the element with coefficients ``g_coeffs``.

    For inner ``theta`` the second Sz.-Nagy-Foias component vanishes and
    ``g_- = conj(theta) g_1`` on the circle.
    """
    g1 = ms.synthesize(g_coeffs)
    return debranges_pair(ms.theta(ms.nodes), g1, None, np.zeros(ms.quad_size))
