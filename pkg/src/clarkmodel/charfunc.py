"""Characteristic functions of the perturbation family.

For a probability measure ``mu`` on the circle

    theta_0     = R1 mu / (1 + R1 mu) = 1 - 1/R mu
    theta_gamma = -gamma + (1-|gamma|^2) R1 mu / (1 + (1-conj(gamma)) R1 mu)
                = (theta_0 - gamma) / (1 - conj(gamma) theta_0)

When ``mu`` is purely atomic these are finite Blaschke products, held
exactly by :class:`RationalInner`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .cauchy import (
    GUARD,
    BoundaryGuardError,
    RadialLimitConfig,
    cauchy_R,
    cauchy_R1,
    cauchy_R2,
    radial_limit,
)
from .measure import CircleMeasure, MeasureError, grid_points

#: size of the grid used to test innerness and the cached fraction
TEST_GRID = 256
#: moments below this are treated as zero when deflating the origin
ORIGIN_MOMENT_TOL = 1e-13


class RootFindingError(RuntimeError):
    """Root finder failed; the message carries the residual."""


class NumericalCheckError(RuntimeError):
    """A built-in post-condition failed."""


def _as_array(z):
    a = np.asarray(z, dtype=complex)
    return a, a.ndim == 0


def _check_gamma(gamma) -> complex:
    g = complex(gamma)
    if not abs(g) < 1:
        raise ValueError("|gamma| must be < 1, got %r" % g)
    return g


def _interior(lam):
    lam, scalar = _as_array(lam)
    if np.any(np.abs(lam) >= 1 - GUARD):
        raise BoundaryGuardError("|lambda| must be < 1 - 1e-8")
    return lam, scalar


def blaschke_factors(zeros: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Array of ``(z - a)/(1 - conj(a) z)``, shape ``zeros.shape + z.shape``."""
    a = np.asarray(zeros, dtype=complex).reshape((-1,) + (1,) * np.ndim(z))
    return (z - a) / (1 - np.conj(a) * z)


def _far_boundary_point(points: np.ndarray) -> complex:
    """A point of the circle far from the arguments of ``points``."""
    if points.size == 0:
        return 1.0 + 0j
    ang = np.sort(np.mod(np.angle(points), 2 * np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    i = int(np.argmax(gaps))
    return complex(np.exp(1j * (ang[i] + gaps[i] / 2)))


def aberth(z0: np.ndarray, dlog, iters: int = 100, tol: float = 1e-15) -> np.ndarray:
    """Aberth-Ehrlich refinement of all roots of a degree ``len(z0)`` polynomial.

    ``dlog(z)`` returns ``f'(z)/f(z)`` elementwise; it may be evaluated in any
    stable form (partial fractions, Blaschke factors).
    """
    z = np.array(z0, dtype=complex)
    for _ in range(iters):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = 1.0 / dlog(z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            step = w / (1 - w * s)
        step = np.where(np.isfinite(step), step, 0)
        z = z - step
        if np.max(np.abs(step), initial=0.0) <= tol * max(1.0, float(np.max(np.abs(z), initial=0.0))):
            break
    return z


@dataclass(frozen=True)
class RationalInner:
    """Finite Blaschke product ``constant * prod (z - a_k)/(1 - conj(a_k) z)``.

    ``num`` and ``den`` cache the polynomial form in increasing powers:
    ``num = constant * prod (z - a_k)`` and ``den = prod (1 - conj(a_k) z)``.
    """

    zeros: np.ndarray
    constant: complex
    num: np.ndarray = field(init=False)
    den: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.array(np.atleast_1d(np.asarray(self.zeros, dtype=complex)), copy=True)
        if a.ndim != 1:
            raise ValueError("zeros must be a 1-d array")
        if np.any(np.abs(a) >= 1):
            raise ValueError("zeros of an inner function must lie in the open disc")
        c = complex(self.constant)
        if abs(abs(c) - 1) > 1e-12:
            raise ValueError("unimodular constant has modulus %r" % abs(c))
        a.setflags(write=False)
        num = c * P.polyfromroots(a) if a.size else np.array([c])
        den = np.array([1.0 + 0j])
        for ak in a:
            den = P.polymul(den, [1.0, -np.conj(ak)])
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "zeros", a)
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "num", np.asarray(num, dtype=complex))
        object.__setattr__(self, "den", np.asarray(den, dtype=complex))

    @property
    def degree(self) -> int:
        return int(self.zeros.size)

    def __call__(self, z):
        z, scalar = _as_array(z)
        v = self.constant * np.prod(blaschke_factors(self.zeros, z), axis=0) if self.degree else (
            self.constant * np.ones_like(z)
        )
        return complex(v) if scalar else v

    def fraction(self, z):
        """Evaluate through the cached numerator/denominator."""
        z, scalar = _as_array(z)
        v = P.polyval(z, self.num) / P.polyval(z, self.den)
        return complex(v) if scalar else v

    def log_derivative(self, z):
        """``theta'/theta = sum (1-|a|^2)/((z-a)(1-conj(a) z))``."""
        z, scalar = _as_array(z)
        a = self.zeros.reshape((-1,) + (1,) * z.ndim)
        v = np.sum((1 - np.abs(a) ** 2) / ((z - a) * (1 - np.conj(a) * z)), axis=0)
        return complex(v) if scalar else v

    def derivative(self, z):
        return self(z) * self.log_derivative(z)

    def innerness_residual(self, n: int = TEST_GRID) -> float:
        return float(np.max(np.abs(np.abs(self(grid_points(n))) - 1)))

    def fraction_residual(self, n: int = TEST_GRID) -> float:
        z = grid_points(n)
        return float(np.max(np.abs(self(z) - self.fraction(z))))

    def validate(self, tol: float = 1e-9) -> "RationalInner":
        """Check innerness on the test grid.

        The monomial form loses digits when zeros crowd the circle, so its
        agreement is reported by :meth:`fraction_residual` but not enforced.
        """
        r1 = self.innerness_residual()
        if r1 > tol:
            raise NumericalCheckError("inner function check failed: max ||theta|-1| = %.3g" % r1)
        return self

    def solve(self, value: complex, iters: int = 100) -> np.ndarray:
        """All ``z`` with ``theta(z) = value`` (``|value| <= 1``).

        Companion-matrix roots of ``num - value*den`` seed an Aberth
        iteration on ``f = den * (theta - value)``, whose logarithmic
        derivative is evaluated from the Blaschke factors.  Aberth steps
        keep the iterates apart, so two seeds cannot collapse onto one root.
        """
        v = complex(value)
        if abs(v) > 1 + 1e-12:
            raise ValueError("|value| must be <= 1")
        n = self.degree
        if n == 0:
            return np.empty(0, dtype=complex)
        m = max(self.num.size, self.den.size)
        poly = np.zeros(m, dtype=complex)
        poly[: self.num.size] += self.num
        poly[: self.den.size] -= v * self.den
        a = np.conj(self.zeros)[:, None]

        def dlog(z):
            th = self(z)
            return th * self.log_derivative(z) / (th - v) - np.sum(a / (1 - a * z[None, :]), axis=0)

        z = aberth(P.polyroots(poly), dlog, iters)
        res = float(np.max(np.abs(self(z) - v)))
        if not res <= 1e-9:
            raise RootFindingError("theta = %r: root residual %.3g" % (v, res))
        return z

    def mobius(self, gamma: complex) -> "RationalInner":
        """``(theta - gamma)/(1 - conj(gamma) theta)`` as a Blaschke product."""
        g = _check_gamma(gamma)
        if g == 0:
            return self
        zs = self.solve(g)
        zeta = _far_boundary_point(np.concatenate([zs, self.zeros]))
        t = self(zeta)
        val = (t - g) / (1 - np.conj(g) * t)
        prod = np.prod(blaschke_factors(zs, np.asarray(zeta)))
        c = val / prod
        return RationalInner(zs, c / abs(c))

    def to_dict(self) -> dict:
        pair = lambda w: [float(w.real), float(w.imag)]  # noqa: E731
        return {
            "zeros": [pair(a) for a in self.zeros],
            "constant": pair(self.constant),
            "num": [pair(a) for a in self.num],
            "den": [pair(a) for a in self.den],
        }


# ---------------------------------------------------------------------------
# pointwise characteristic functions


def theta0(mu: CircleMeasure, lam, *, check: bool = True):
    """``theta_0(lam) = R1 mu / (1 + R1 mu)`` for ``|lam| < 1``."""
    mu.require_probability()
    lam, scalar = _interior(lam)
    r1 = cauchy_R1(mu, lam)
    r1 = np.asarray(r1)
    val = r1 / (1 + r1)
    if check:
        r2 = 2 * r1 + 1  # R2 = 2R - 1 = 2 R1 + 1 for a probability measure
        alt = (r2 - 1) / (r2 + 1)
        err = float(np.max(np.abs(np.asarray(val - alt))))
        if err > 1e-12:
            raise NumericalCheckError("theta_0 forms disagree by %.3g" % err)
    return complex(val) if scalar else val


def theta_gamma(mu: CircleMeasure, gamma, lam, *, check: bool = True):
    """``theta_gamma(lam)`` from ``R1 mu``; checked against the Mobius form."""
    g = _check_gamma(gamma)
    mu.require_probability()
    lam, scalar = _interior(lam)
    r1 = np.asarray(cauchy_R1(mu, lam))
    val = -g + (1 - abs(g) ** 2) * r1 / (1 + (1 - np.conj(g)) * r1)
    if check:
        t0 = r1 / (1 + r1)
        alt = (t0 - g) / (1 - np.conj(g) * t0)
        err = float(np.max(np.abs(np.asarray(val - alt))))
        if err > 1e-12:
            raise NumericalCheckError("theta_gamma forms disagree by %.3g" % err)
    return complex(val) if scalar else val


def theta0_boundary(mu: CircleMeasure, z, cfg: Optional[RadialLimitConfig] = None):
    """Boundary values of ``theta_0`` on the circle.

    Atomic measures use ``1 - 1/R mu`` directly (continuous on the circle,
    equal to one at the atoms); otherwise a radial limit from inside.
    """
    z, scalar = _as_array(z)
    if mu.is_atomic:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = cauchy_R(mu, z, guard=False)
            val = np.where(np.isfinite(r), 1 - 1 / r, 1.0 + 0j)
        return complex(val) if scalar else val
    lim = radial_limit(lambda lam: theta0(mu, lam, check=False), z, "inner", cfg)
    return lim.value


def delta_gamma(mu: CircleMeasure, gamma, z, cfg: Optional[RadialLimitConfig] = None):
    """``Delta_gamma = sqrt(1 - |theta_gamma|^2)`` on the circle.

    Cross-checked against ``sqrt(1-|g|^2) Delta_0 / |1 - conj(g) theta_0|``.
    For atomic ``mu`` the function is inner and zero is returned once the
    boundary modulus is confirmed to be one.
    """
    g = _check_gamma(gamma)
    mu.require_probability()
    z, scalar = _as_array(z)
    t0 = theta0_boundary(mu, z, cfg)
    tg = (t0 - g) / (1 - np.conj(g) * t0)
    if mu.is_atomic:
        dev = float(np.max(np.abs(1 - np.abs(np.asarray(tg)) ** 2)))
        if dev > 1e-9:
            raise NumericalCheckError("atomic theta is not unimodular on the circle (%.3g)" % dev)
        out = np.zeros(z.shape)
        return float(out) if scalar else out
    d = np.sqrt(np.clip(1 - np.abs(tg) ** 2, 0.0, 1.0))
    d0 = np.sqrt(np.clip(1 - np.abs(t0) ** 2, 0.0, 1.0))
    alt = np.sqrt(1 - abs(g) ** 2) * d0 / np.abs(1 - np.conj(g) * t0)
    err = float(np.max(np.abs(np.asarray(d - alt))))
    if err > 1e-9:
        raise NumericalCheckError("Delta_gamma forms disagree by %.3g" % err)
    return float(d) if scalar else d


# ---------------------------------------------------------------------------
# exact rational form for atomic measures


def _theta0_numerator_tail(xi: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Coefficients of ``Q(z) = sum_k m_k conj(xi_k) prod_{j != k} (1 - conj(xi_j) z)``."""
    n = xi.size
    q = np.zeros(max(n, 1), dtype=complex)
    for k in range(n):
        others = np.delete(xi, k)
        # prod (1 - conj(x) z) = prod(-conj(x)) * prod (z - x)
        c = np.prod(-np.conj(others)) * P.polyfromroots(others) if others.size else np.array([1.0 + 0j])
        q[: c.size] += m[k] * np.conj(xi[k]) * c
    return q


def rational_theta0(mu: CircleMeasure) -> RationalInner:
    """``theta_0`` of a purely atomic probability measure as a Blaschke product.

    ``1 - theta_0 = 1/R mu`` with ``R mu = P/D`` gives ``theta_0 = (P - D)/P``
    and ``P - D = z Q(z)``.  The roots of ``Q`` are found from the companion
    matrix and refined by Aberth iteration on the partial-fraction form of
    ``R1 mu(z)/z``.
    """
    mu.require_atomic().require_probability()
    xi, m = mu.atoms, mu.masses
    n = xi.size
    zeros = [0.0 + 0j]
    if n > 1:
        q = _theta0_numerator_tail(xi, m)
        # q_j = mu_hat(j + 1) while the lower coefficients vanish; leading
        # vanishing moments give a multiple zero at the origin
        j0 = 0
        while j0 < n - 1 and abs(np.sum(m * np.conj(xi) ** (j0 + 1))) <= ORIGIN_MOMENT_TOL:
            j0 += 1
        q = q[j0:]
        zeros.extend([0.0 + 0j] * j0)
        cx = np.conj(xi)[:, None]
        mc = (m * np.conj(xi))[:, None]

        def h(z):
            return np.sum(mc / (1 - cx * z[None, :]), axis=0)

        def dlog(z):
            d = 1 - cx * z[None, :]
            hp = np.sum(mc * cx / d**2, axis=0)
            return hp / h(z) - np.sum(cx / d, axis=0) - j0 / z

        roots = aberth(P.polyroots(q), dlog) if q.size > 1 else np.empty(0, dtype=complex)
        if np.any(np.abs(roots) >= 1):
            bad = roots[np.abs(roots) >= 1]
            raise RootFindingError(
                "zero of theta_0 outside the disc: |a| = %r, residual %.3g"
                % (float(np.abs(bad).max()), float(np.max(np.abs(h(bad)))))
            )
        zeros.extend(roots)
    zeros = np.array(zeros)
    zeta = _far_boundary_point(np.concatenate([xi, zeros]))
    t = 1 - 1 / cauchy_R(mu, zeta, guard=False)
    c = t / np.prod(blaschke_factors(zeros, np.asarray(zeta)))
    th = RationalInner(zeros, c / abs(c))
    # compare against the direct formula on the test grid
    z = grid_points(TEST_GRID)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = cauchy_R(mu, z, guard=False)
        direct = np.where(np.isfinite(r), 1 - 1 / r, 1.0)
    res = float(np.max(np.abs(th(z) - direct)))
    if res > 1e-9:
        raise RootFindingError("rational theta_0 disagrees with 1 - 1/R mu by %.3g" % res)
    return th.validate()


def theta_fourier(mu: CircleMeasure, gamma, k: int, rho: float = 0.5, points: int = 256) -> complex:
    """Taylor coefficient ``theta_gamma_hat(k)`` by contour quadrature at radius ``rho``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if mu.has_density and k > mu.grid_size // 4:
        raise ValueError("k exceeds a quarter of the density grid")
    w = grid_points(points)
    vals = theta_gamma(mu, gamma, rho * w)
    return complex(np.mean(vals * w ** (-k)) / rho**k)


def char_function_from_matrix(T: np.ndarray, b1: np.ndarray, b: np.ndarray, z) -> np.ndarray:
    """Scalar characteristic function of a contraction with rank-one defects.

    ``theta(z) = < (-T + z D_{T*} (I - z T*)^{-1} D_T) b1, b >`` with
    principal square roots for the defect operators.
    """
    z, scalar = _as_array(z)
    n = T.shape[0]
    D = _psd_sqrt(np.eye(n) - T.conj().T @ T)
    Ds = _psd_sqrt(np.eye(n) - T @ T.conj().T)
    out = np.empty(z.shape, dtype=complex)
    for idx, zz in np.ndenumerate(z):
        x = -T @ b1 + zz * Ds @ np.linalg.solve(np.eye(n) - zz * T.conj().T, D @ b1)
        out[idx] = np.vdot(b, x)
    return complex(out) if scalar else out


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues at rounding level are set to zero; their square roots
    would otherwise be of order 1e-8.
    """
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w), initial=0.0)))
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


@dataclass(frozen=True)
class CharFunctionHandle:
    """``theta_gamma`` of ``mu`` with its exact form when ``mu`` is atomic."""

    measure: CircleMeasure
    gamma: complex
    rational: Optional[RationalInner] = None

    def __post_init__(self):
        g = _check_gamma(self.gamma)
        object.__setattr__(self, "gamma", g)
        self.measure.require_probability()
        if self.rational is None and self.measure.is_atomic:
            object.__setattr__(self, "rational", rational_theta0(self.measure).mobius(g))
        if abs(self(0.0) + g) > 1e-10:
            raise NumericalCheckError("theta_gamma(0) != -gamma")

    def __call__(self, lam):
        if self.rational is not None:
            return self.rational(lam)
        return theta_gamma(self.measure, self.gamma, lam)

    def boundary(self, z, cfg: Optional[RadialLimitConfig] = None):
        if self.rational is not None:
            return self.rational(z)
        t0 = theta0_boundary(self.measure, z, cfg)
        g = self.gamma
        return (t0 - g) / (1 - np.conj(g) * t0)

    def delta(self, z, cfg: Optional[RadialLimitConfig] = None):
        return delta_gamma(self.measure, self.gamma, z, cfg)


def require_atomic_probability(mu: CircleMeasure) -> CircleMeasure:
    if not mu.is_atomic:
        raise MeasureError("operation requires a purely atomic measure")
    return mu.require_probability()
