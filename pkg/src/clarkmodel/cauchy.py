"""Cauchy-type transforms of circle measures and their boundary values.

For a (possibly weighted) measure ``tau`` the three transforms are

    R tau(l)  = integral dtau(xi) / (1 - conj(xi) l)
    R1 tau(l) = R tau(l) - tau(T)
    R2 tau(l) = 2 R tau(l) - tau(T)

Atoms are summed exactly.  The density part is evaluated from the Fourier
coefficients of the trigonometric interpolant of the weighted density:
``sum_{k>=0} g_hat(k) l**k`` inside the disc and
``-sum_{k>=1} g_hat(-k) l**(-k)`` outside.  A plain trapezoid rule of the
kernel is useless close to the circle, where ``l**N`` aliasing dominates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .measure import CircleMeasure, grid_points
from .opmatrix import OperatorMatrix

#: width of the forbidden band around the unit circle
GUARD = 1e-8


class BoundaryGuardError(ValueError):
    """Direct evaluation requested too close to the unit circle."""


def _as_array(lam):
    arr = np.asarray(lam, dtype=complex)
    return arr, arr.ndim == 0


def weight_values(mu: CircleMeasure, f) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Values of the weight ``f`` at the atoms and at the density grid.

    ``f`` may be ``None`` (weight one), a callable of the unit complex
    variable, or a pair ``(atom_values, grid_values)``.
    """
    grid_n = mu.grid_size
    if f is None:
        fa = np.ones(mu.n_atoms, dtype=complex)
        fg = np.ones(grid_n, dtype=complex) if grid_n else None
    elif callable(f):
        fa = np.asarray(f(mu.atoms), dtype=complex) * np.ones(mu.n_atoms)
        fg = np.asarray(f(mu.grid()), dtype=complex) * np.ones(grid_n) if grid_n else None
    else:
        fa, fg = f
        fa = np.asarray(fa, dtype=complex).reshape(mu.n_atoms)
        fg = None if fg is None else np.asarray(fg, dtype=complex).reshape(grid_n)
    return fa, fg


def _split_coefficients(g: np.ndarray):
    """Nonnegative and negative frequency coefficients of grid samples ``g``.

    For even ``N`` the Nyquist coefficient is put on the negative side.
    """
    n = g.size
    c = np.fft.fft(g) / n
    npos = (n + 1) // 2
    pos = c[:npos]
    neg = c[npos:][::-1]  # neg[k-1] = g_hat(-k)
    return pos, neg


def _density_cauchy(g: np.ndarray, lam: np.ndarray) -> np.ndarray:
    pos, neg = _split_coefficients(g)
    out = np.empty(lam.shape, dtype=complex)
    inside = np.abs(lam) < 1
    if np.any(inside):
        out[inside] = P.polyval(lam[inside], pos)
    if np.any(~inside):
        w = 1.0 / lam[~inside]
        out[~inside] = -w * P.polyval(w, neg)
    return out


def _ring_radius(lam: np.ndarray, n: int) -> Optional[float]:
    """Return ``r`` if ``lam`` is exactly ``r`` times the ``n``-point grid."""
    if lam.ndim != 1 or lam.size != n or n == 0:
        return None
    q = lam / grid_points(n)
    r = q[0].real
    if abs(q[0].imag) > 1e-14 * abs(r) or not np.allclose(q, r, rtol=1e-13, atol=0):
        return None
    return float(r)


def _density_cauchy_ring(g: np.ndarray, r: float) -> np.ndarray:
    n = g.size
    pos, neg = _split_coefficients(g)
    coef = np.zeros(n, dtype=complex)
    if r < 1:
        coef[: pos.size] = pos * r ** np.arange(pos.size)
    else:
        k = np.arange(1, neg.size + 1)
        coef[n - k] = -neg * r ** (-k.astype(float))
    return np.fft.ifft(coef) * n


def _atom_cauchy(atoms, weights, lam):
    if atoms.size == 0:
        return np.zeros(lam.shape, dtype=complex)
    den = 1.0 - np.conj(atoms)[None, :] * lam.reshape(-1, 1)
    return (weights[None, :] / den).sum(axis=1).reshape(lam.shape)


def _check_guard(lam):
    if np.any(np.abs(np.abs(lam) - 1.0) <= GUARD):
        raise BoundaryGuardError("too close to the unit circle; use radial_limit for boundary values")


def cauchy_R(mu: CircleMeasure, lam, f=None, *, guard: bool = True):
    """Cauchy transform ``R(f mu)(lam)`` for ``lam`` off the unit circle.

    Parameters
    ----------
    mu : CircleMeasure
    lam : complex or array of complex
    f : None, callable or (atom_values, grid_values)
        Optional weight; see :func:`weight_values`.
    guard : bool
        Enforce the guard band ``||lam| - 1| > 1e-8``.  Only internal
        callers that know the atoms avoid ``lam`` switch it off.
    """
    lam, scalar = _as_array(lam)
    if guard:
        _check_guard(lam)
    fa, fg = weight_values(mu, f)
    out = _atom_cauchy(mu.atoms, mu.masses * fa, lam)
    if mu.density is not None:
        g = fg * mu.density
        r = _ring_radius(lam, mu.grid_size)
        if r is not None:
            out = out + _density_cauchy_ring(g, r)
        else:
            out = out + _density_cauchy(g, lam)
    return complex(out) if scalar else out


def weighted_mass(mu: CircleMeasure, f=None) -> complex:
    """``integral f dmu``."""
    fa, fg = weight_values(mu, f)
    s = np.sum(mu.masses * fa)
    if mu.density is not None:
        s += np.mean(fg * mu.density)
    return complex(s)


def cauchy_R1(mu: CircleMeasure, lam, f=None, *, guard: bool = True):
    """``R1 tau = R tau - tau(T)``."""
    return cauchy_R(mu, lam, f, guard=guard) - weighted_mass(mu, f)


def cauchy_R2(mu: CircleMeasure, lam, f=None, *, guard: bool = True):
    """``R2 tau = 2 R tau - tau(T)``."""
    return 2 * cauchy_R(mu, lam, f, guard=guard) - weighted_mass(mu, f)


def poisson_extension(mu: CircleMeasure, z):
    """Poisson integral ``Re R2 mu(z)`` for ``|z| < 1``."""
    z, scalar = _as_array(z)
    if np.any(np.abs(z) >= 1 - GUARD):
        raise BoundaryGuardError("poisson_extension needs |z| < 1 - 1e-8")
    v = np.real(cauchy_R2(mu, z))
    return float(v) if scalar else v


# ---------------------------------------------------------------------------
# radial limits


def _default_radii():
    return tuple(2.0 ** -np.arange(4, 15))


@dataclass(frozen=True)
class RadialLimitConfig:
    """Radii ``eps`` (evaluation at ``(1 -+ eps) z``) and extrapolation order.

    The extrapolated value is the degree ``order - 1`` interpolating
    polynomial in ``eps`` through the ``order`` smallest radii, evaluated at
    ``eps = 0``.
    """

    radii: Sequence[float] = field(default_factory=_default_radii)
    extrapolation_order: int = 4

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 1:
            raise ValueError("radii must be a nonempty sequence")
        if np.any(np.diff(r) >= 0):
            raise ValueError("radii must be strictly decreasing")
        if np.any(r <= 0) or np.any(r >= 0.5):
            raise ValueError("radii must lie in (0, 1/2)")
        if not 1 <= self.extrapolation_order <= r.size:
            raise ValueError("extrapolation_order must be in [1, len(radii)]")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))


@dataclass(frozen=True)
class RadialLimit:
    """Result of :func:`radial_limit`.

    ``error`` is the difference between the last two extrapolants and
    ``diverged`` flags points where the samples blow up.
    """

    value: np.ndarray
    error: np.ndarray
    diverged: np.ndarray

    @property
    def ok(self) -> bool:
        return not bool(np.any(self.diverged))


def _neville_at_zero(x: np.ndarray, y: np.ndarray):
    """Neville tableau at 0. Returns (final value, previous-order value)."""
    m = x.size
    p = [y[i].copy() for i in range(m)]
    prev = y[-1]
    for k in range(1, m):
        for i in range(m - k):
            j = i + k
            p[i] = (x[j] * p[i] - x[i] * p[i + 1]) / (x[j] - x[i])
        if k == m - 2:
            prev = p[1]  # extrapolant through the last m-1 points
    return p[0], prev


def radial_limit(
    F: Callable[[np.ndarray], np.ndarray],
    z,
    side: str = "inner",
    cfg: Optional[RadialLimitConfig] = None,
) -> RadialLimit:
    """Boundary value of ``F`` at ``z`` along the radius.

    Parameters
    ----------
    F : callable
        Vectorized function of a complex array.
    z : complex or array
        Points on the unit circle.
    side : {"inner", "outer"}
        Evaluate at ``(1 - eps) z`` or ``(1 + eps) z``.
    cfg : RadialLimitConfig, optional
    """
    cfg = cfg or RadialLimitConfig()
    if side not in ("inner", "outer"):
        raise ValueError("side must be 'inner' or 'outer'")
    z, scalar = _as_array(z)
    if np.any(np.abs(np.abs(z) - 1) > 1e-12):
        raise ValueError("radial_limit needs unit-modulus points")
    eps = np.asarray(cfg.radii)
    sgn = -1.0 if side == "inner" else 1.0
    zz = z.reshape(-1)
    samples = np.stack([np.asarray(F((1 + sgn * e) * zz), dtype=complex).reshape(zz.shape) for e in eps])
    mags = np.abs(samples)
    grows = np.all(np.diff(mags, axis=0) > 0, axis=0)
    ratio = mags[-1] / np.maximum(mags[0], np.finfo(float).tiny)
    diverged = grows & (ratio > 10)
    m = cfg.extrapolation_order
    x = eps[-m:] if m > 1 else eps[-1:]
    y = samples[-m:] if m > 1 else samples[-1:]
    if m == 1:
        val = samples[-1]
        prev = samples[-2] if samples.shape[0] > 1 else samples[-1]
    else:
        val, prev = _neville_at_zero(x, y)
    err = np.abs(val - prev)
    if scalar:
        return RadialLimit(complex(val[0]), float(err[0]), bool(diverged[0]))
    shape = z.shape
    return RadialLimit(val.reshape(shape), err.reshape(shape), diverged.reshape(shape))


def boundary_cauchy(mu: CircleMeasure, z, side: str, f=None, cfg=None) -> RadialLimit:
    """``T_+ f`` (side ``"inner"``) or ``T_- f`` (side ``"outer"``) at ``z``."""
    fa, fg = weight_values(mu, f)
    return radial_limit(lambda lam: cauchy_R(mu, lam, (fa, fg)), z, side, cfg)


# ---------------------------------------------------------------------------
# kernel discretization


def as_quadrature_atoms(mu: CircleMeasure) -> tuple[np.ndarray, np.ndarray]:
    """Atoms and masses, with a density collapsed onto its grid points."""
    pts, w = [mu.atoms], [mu.masses]
    if mu.density is not None:
        keep = mu.density > 0
        pts.append(mu.grid()[keep])
        w.append(mu.density[keep] / mu.grid_size)
    return np.concatenate(pts), np.concatenate(w)


def discretize_Tr(
    source: CircleMeasure,
    target: CircleMeasure,
    r: float,
    source_id: str = "L2(source)",
    target_id: str = "L2(target)",
) -> OperatorMatrix:
    """Nystrom matrix of ``T_r``, kernel ``1 / (1 - r conj(xi) z)``.

    Entry ``(i, j)`` is ``K_r(z_i, xi_j) sqrt(t_i) sqrt(s_j)`` so that the
    spectral norm approximates ``||T_r||`` between the two ``L^2`` spaces.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if abs(r - 1) < 1e-6:
        raise ValueError("r too close to 1")
    xi, s = as_quadrature_atoms(source)
    z, t = as_quadrature_atoms(target)
    K = 1.0 / (1.0 - r * np.conj(xi)[None, :] * z[:, None])
    return OperatorMatrix(np.sqrt(t)[:, None] * K * np.sqrt(s)[None, :], source_id, target_id)
