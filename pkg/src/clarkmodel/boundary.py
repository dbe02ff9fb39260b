"""Boundary (grid) formulas for the Clark operator of a general measure.

Functions on the circle are carried by their samples on an equispaced grid,
normally the density grid of ``mu``.  ``T_+ f`` and ``T_- f`` are boundary
values of ``R(f mu)`` from inside and outside the disc; for a purely atomic
measure they coincide off the atoms and are evaluated directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cauchy import (
    RadialLimitConfig,
    as_quadrature_atoms,
    cauchy_R,
    discretize_Tr,
    radial_limit,
    weight_values,
)
from .charfunc import _check_gamma, theta0_boundary
from .measure import CircleMeasure, circular_distance, grid_points
from .model_space import frequency_content
from .opmatrix import OperatorMatrix, operator_norm

#: density floor below which f_a cannot be recovered
W_FLOOR = 1e-8


class RadialDivergenceError(ArithmeticError):
    """A boundary value was requested where the radial limit blows up."""


class InconsistentMemberError(ValueError):
    """The pair ``(g_1, g_-)`` is not the image of an ``L^2(mu)`` function."""


def _circle(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(np.abs(z) - 1) > 1e-12):
        raise ValueError("points must lie on the unit circle")
    return z


def _near_atom(mu: CircleMeasure, z: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if mu.n_atoms == 0:
        return np.zeros(z.shape, dtype=bool)
    d = circular_distance(np.angle(z)[:, None], mu.angles[None, :])
    return np.any(d < tol, axis=1)


def boundary_values(F: Callable, mu: CircleMeasure, z, side: str, cfg: Optional[RadialLimitConfig] = None):
    """Boundary values of an analytic expression ``F`` built from Cauchy transforms.

    Atomic measures are evaluated on the circle itself; measures with a
    density use :func:`radial_limit` and raise on divergence.
    """
    z = _circle(z)
    if mu.is_atomic:
        if np.any(_near_atom(mu, z)):
            raise RadialDivergenceError("boundary value requested at an atom")
        return np.asarray(F(z), dtype=complex)
    lim = radial_limit(F, z, side, cfg)
    if not lim.ok:
        raise RadialDivergenceError("radial limit diverges at %d points" % int(np.sum(lim.diverged)))
    return np.asarray(lim.value)


def T_plus(mu: CircleMeasure, z, f=None, cfg=None):
    fa, fg = weight_values(mu, f)
    return boundary_values(lambda l: cauchy_R(mu, l, (fa, fg), guard=False), mu, z, "inner", cfg)


def T_minus(mu: CircleMeasure, z, f=None, cfg=None):
    fa, fg = weight_values(mu, f)
    return boundary_values(lambda l: cauchy_R(mu, l, (fa, fg), guard=False), mu, z, "outer", cfg)


def density_on(mu: CircleMeasure, z: np.ndarray) -> np.ndarray:
    """Density ``w`` at ``z``: zero for atomic ``mu``, grid samples otherwise."""
    if mu.density is None:
        return np.zeros(z.shape)
    N = mu.grid_size
    k = np.mod(np.angle(z), 2 * np.pi) * N / (2 * np.pi)
    idx = np.rint(k).astype(int)
    if np.any(np.abs(k - idx) > 1e-9):
        raise ValueError("density is known only on its own grid")
    return np.asarray(mu.density)[idx % N]


def _theta0_on(mu, z, cfg):
    t0 = theta0_boundary(mu, z, cfg)
    return np.asarray(t0, dtype=complex) * np.ones(z.shape)


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values of ``mu`` on a circle grid."""

    z: np.ndarray
    w: np.ndarray
    theta0: np.ndarray
    delta0: np.ndarray
    T_plus_1: np.ndarray
    T_minus_1: np.ndarray


def boundary_data(mu: CircleMeasure, z=None, cfg: Optional[RadialLimitConfig] = None) -> BoundaryData:
    """``theta_0``, ``Delta_0``, ``T_+ 1``, ``T_- 1`` and ``w`` on ``z``.

    ``z`` defaults to the density grid of ``mu``.
    """
    mu.require_probability()
    if z is None:
        if mu.grid_size == 0:
            raise ValueError("atomic measure: pass the grid explicitly")
        z = grid_points(mu.grid_size)
    z = _circle(z)
    t0 = _theta0_on(mu, z, cfg)
    d0 = np.sqrt(np.clip(1 - np.abs(t0) ** 2, 0, 1))
    return BoundaryData(z, density_on(mu, z), t0, d0, T_plus(mu, z, None, cfg), T_minus(mu, z, None, cfg))


# ---------------------------------------------------------------------------
# Phi*_gamma on the boundary


def universal_coefficients(theta0: np.ndarray, gamma, inner: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """``A_gamma`` and ``B_gamma`` as arrays of shape ``(2,) + theta0.shape``.

    ``inner=True`` sets ``Delta_0 = 0`` (atomic measures).
    """
    g = _check_gamma(gamma)
    t0 = np.asarray(theta0, dtype=complex)
    d0 = np.zeros(t0.shape) if inner else np.sqrt(np.clip(1 - np.abs(t0) ** 2, 0, 1))
    s = np.sqrt(1 - abs(g) ** 2)
    q = 1 - np.conj(g) * t0
    A = np.stack([s / q, np.conj(g) * d0 / np.abs(q)])
    B = np.stack([s * (1 - t0) / q, (np.conj(g) - 1) * d0 / np.abs(q)])
    return A, B


def phi_star_universal_apply(
    mu: CircleMeasure,
    gamma,
    f: Callable,
    z,
    df: Optional[Callable] = None,
    cfg: Optional[RadialLimitConfig] = None,
) -> np.ndarray:
    """``Phi*_gamma f = A f + B int (f(xi) - f(z)) / (1 - conj(xi) z) dmu(xi)``.

    Parameters
    ----------
    f : callable
        ``C^1`` function of the circle variable.
    z : array
        Circle points.
    df : callable, optional
        ``d f(e^{it}) / dt``; needed when a point of ``z`` coincides with an
        atom or a density node, where the integrand is replaced by its limit
        ``-i df(z)``.

    Returns
    -------
    ndarray, shape (2, len(z))
        Sz.-Nagy-Foias components ``(g_1, g_2)``.
    """
    mu.require_probability()
    z = _circle(z)
    xi, m = as_quadrature_atoms(mu)
    fz = np.asarray(f(z), dtype=complex) * np.ones(z.shape)
    fx = np.asarray(f(xi), dtype=complex) * np.ones(xi.shape)
    u = 1 - np.conj(xi)[None, :] * z[:, None]
    hit = np.abs(u) < 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = (fx[None, :] - fz[:, None]) / u
    if np.any(hit):
        if df is None:
            raise ValueError("derivative data needed at points coinciding with the support of mu")
        dz = np.asarray(df(z), dtype=complex) * np.ones(z.shape)
        r, _ = np.nonzero(hit)
        Q[hit] = -1j * dz[r]
    integral = Q @ m
    if mu.is_atomic:
        with np.errstate(divide="ignore", invalid="ignore"):
            Rz = cauchy_R(mu, z, guard=False)
            t0 = np.where(np.isfinite(Rz), 1 - 1 / Rz, 1.0)
    else:
        t0 = _theta0_on(mu, z, cfg)
    A, B = universal_coefficients(t0, gamma, mu.is_atomic)
    return A * fz[None, :] + B * integral[None, :]


def phi_star_g1(mu: CircleMeasure, gamma, f=None, z=None, cfg=None) -> np.ndarray:
    """``g_1`` as the boundary value of ``sqrt(1-|g|^2) R(f mu) / ((1 - conj(g) theta_0) R mu)``.

    The expression is written as ``sqrt(1-|g|^2) R(f mu) / ((1-conj(g)) R mu + conj(g))``.
    """
    g = _check_gamma(gamma)
    z = grid_points(mu.grid_size) if z is None else _circle(z)
    fa, fg = weight_values(mu, f)
    s = np.sqrt(1 - abs(g) ** 2)
    cg = np.conj(g)

    def F(lam):
        return s * cauchy_R(mu, lam, (fa, fg), guard=False) / ((1 - cg) * cauchy_R(mu, lam, guard=False) + cg)

    return boundary_values(F, mu, z, "inner", cfg)


@dataclass(frozen=True)
class GMinus:
    """``g_-`` on a grid with its diagnostics.

    ``form_discrepancy`` compares the ratio form with the product form at
    points where ``|T_- 1| > 1e-6``; ``nonnegative_content`` is the relative
    weight of nonnegative Fourier modes.
    """

    values: np.ndarray
    form_discrepancy: float
    nonnegative_content: float


def g_minus(mu: CircleMeasure, gamma, f=None, z=None, cfg=None) -> GMinus:
    """``g_- = -sqrt(1-|g|^2) (1 - conj(theta_0)) / (1 - g conj(theta_0)) T_- f``.

    The ratio form ``(1-|g|^2)^{-1/2} (conj(theta_g) + conj(g)) T_- f / T_- 1``
    is evaluated as a cross-check where ``T_- 1`` is not small.
    """
    g = _check_gamma(gamma)
    mu.require_probability()
    z = grid_points(mu.grid_size) if z is None else _circle(z)
    s = np.sqrt(1 - abs(g) ** 2)
    t0 = _theta0_on(mu, z, cfg)
    Tf = T_minus(mu, z, f, cfg)
    ct = np.conj(t0)
    val = -s * (1 - ct) / (1 - g * ct) * Tf
    T1 = T_minus(mu, z, None, cfg)
    ok = np.abs(T1) > 1e-6
    disc = 0.0
    if np.any(ok):
        tg = (t0 - g) / (1 - np.conj(g) * t0)
        ratio = (np.conj(tg[ok]) + np.conj(g)) * Tf[ok] / (s * T1[ok])
        disc = float(np.max(np.abs(ratio - val[ok])))
    content = frequency_content(val, "nonnegative") if z.size == mu.grid_size and mu.grid_size else float("nan")
    return GMinus(val, disc, content)


def phi_apply_grid(
    mu: CircleMeasure,
    gamma,
    g1: np.ndarray,
    gm: np.ndarray,
    cfg: Optional[RadialLimitConfig] = None,
    w_floor: float = W_FLOOR,
) -> np.ndarray:
    """Absolutely continuous part ``f_a`` on the density grid.

    ``(1-|g|^2)^{1/2} w f_a = (1 - conj(g) theta_0)/(1 - theta_0) g_1
    + (1 - g conj(theta_0))/(1 - conj(theta_0)) g_-``.
    """
    g = _check_gamma(gamma)
    bd = boundary_data(mu, None, cfg)
    t0 = bd.theta0
    comb = (1 - np.conj(g) * t0) / (1 - t0) * g1 + (1 - g * np.conj(t0)) / (1 - np.conj(t0)) * gm
    comb = comb / np.sqrt(1 - abs(g) ** 2)
    small = bd.w <= w_floor
    if np.any(small & (np.abs(comb) > w_floor)):
        raise InconsistentMemberError("nonzero combination where the density vanishes")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(small, 0.0, comb / np.where(small, 1.0, bd.w))


def singular_values_at_atoms(
    g1: Callable, gamma, atoms: np.ndarray, cfg: Optional[RadialLimitConfig] = None
) -> np.ndarray:
    """``f_s`` at the atoms: radial limit of ``(1 - conj(g)) (1-|g|^2)^{-1/2} g_1``."""
    g = _check_gamma(gamma)
    k = (1 - np.conj(g)) / np.sqrt(1 - abs(g) ** 2)
    lim = radial_limit(lambda lam: k * g1(lam), np.asarray(atoms, dtype=complex), "inner", cfg)
    if not lim.ok:
        raise RadialDivergenceError("radial limit of g_1 diverges at an atom")
    return np.asarray(lim.value)


# ---------------------------------------------------------------------------
# exterior normalized Cauchy transform and norm bounds


def bounded_exterior_transform(mu: CircleMeasure, f=None, z=None, cfg=None) -> np.ndarray:
    """``conj(theta_0) T_- f / T_- 1``, evaluated as ``-(1 - conj(theta_0)) T_- f``."""
    mu.require_probability()
    z = grid_points(mu.grid_size) if z is None else _circle(z)
    t0 = _theta0_on(mu, z, cfg)
    return -(1 - np.conj(t0)) * T_minus(mu, z, f, cfg)


def exterior_transform_matrix(mu: CircleMeasure, cfg=None) -> OperatorMatrix:
    """Grid matrix of the exterior transform, ``L^2(w dm) -> L^2(m)``.

    For a density sampled on ``N`` points, ``T_- f = -P_-(w f)`` where ``P_-``
    keeps the negative Fourier modes (Nyquist included).  Coordinates are
    ``f_j sqrt(w_j/N)`` on the source side and ``h_j / sqrt(N)`` on the target.
    """
    if not mu.has_density or mu.n_atoms:
        raise ValueError("exterior transform matrix needs a pure density")
    N = mu.grid_size
    t0 = _theta0_on(mu, grid_points(N), cfg)
    k = np.fft.fftfreq(N, d=1.0 / N)
    neg = (k < 0) | (k == -(N // 2))
    F = np.fft.fft(np.eye(N), axis=0)
    Pm = np.fft.ifft(neg[:, None] * F, axis=0)
    w = np.asarray(mu.density)
    M = (1 - np.conj(t0))[:, None] * Pm * np.sqrt(w)[None, :]
    return OperatorMatrix(M, "L2(mu)/grid[%d]" % N, "L2(m)/grid[%d]" % N)


def v_gamma(mu: CircleMeasure, gamma, z, cfg=None) -> np.ndarray:
    """Weight ``v_gamma = |B_gamma|^2`` on ``z``."""
    z = _circle(z)
    if mu.is_atomic:
        with np.errstate(divide="ignore", invalid="ignore"):
            Rz = cauchy_R(mu, z, guard=False)
            t0 = np.where(np.isfinite(Rz), 1 - 1 / Rz, 1.0)
    else:
        t0 = _theta0_on(mu, z, cfg)
    _, B = universal_coefficients(t0, gamma, mu.is_atomic)
    return np.sum(np.abs(B) ** 2, axis=0)


@dataclass(frozen=True)
class NormSweepRow:
    r: float
    norm: float
    source_id: str
    target_id: str


def norm_sweep(
    mu: CircleMeasure,
    gamma,
    radii: Sequence[float],
    target_n: int = 1024,
    cfg: Optional[RadialLimitConfig] = None,
) -> list:
    """``||T_r||`` from ``L^2(mu)`` to ``L^2(v_gamma)`` for each ``r``.

    The target weight is sampled on ``target_n`` equispaced points.
    """
    z = grid_points(target_n)
    target = CircleMeasure.from_density(v_gamma(mu, gamma, z, cfg))
    rows = []
    for r in radii:
        M = discretize_Tr(mu, target, float(r), "L2(mu)", "L2(v_gamma)/grid[%d]" % target_n)
        rows.append(NormSweepRow(float(r), operator_norm(M), M.source_basis_id, M.target_basis_id))
    return rows
