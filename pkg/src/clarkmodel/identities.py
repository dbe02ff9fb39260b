"""Pointwise boundary identities of a measure on its density grid."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .boundary import T_minus, T_plus, boundary_data, g_minus, phi_star_g1
from .cauchy import RadialLimitConfig
from .charfunc import _check_gamma
from .measure import CircleMeasure, circular_distance, grid_points

#: default tolerance of every identity
IDENTITY_TOL = 1e-6


def default_test_function(x):
    """A smooth non-analytic test function."""
    return np.exp(np.real(x)) * x**2 + 0.3 * np.conj(x)


@dataclass(frozen=True)
class IdentityRow:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def identity_suite(
    mu: CircleMeasure,
    gamma=0.0,
    f: Callable = default_test_function,
    grid_n: Optional[int] = None,
    tol: float = IDENTITY_TOL,
    cfg: Optional[RadialLimitConfig] = None,
    atom_exclusion: int = 16,
) -> list:
    """Maximum pointwise errors of the boundary identities.

    The grid is the density grid of ``mu`` (``grid_n`` must match it if
    given).  Grid points within ``atom_exclusion`` spacings of an atom are
    skipped.
    """
    g = _check_gamma(gamma)
    mu.require_probability()
    if not mu.has_density:
        raise ValueError("identity suite needs a measure with a density")
    N = mu.grid_size
    if grid_n is not None and grid_n != N:
        raise ValueError("grid size %d differs from the density grid %d" % (grid_n, N))
    z = grid_points(N)
    if mu.n_atoms:
        d = np.min(circular_distance(np.angle(z)[:, None], mu.angles[None, :]), axis=1)
        z = z[d > atom_exclusion * 2 * np.pi / N]
    bd = boundary_data(mu, z, cfg)
    t0, w, d0 = bd.theta0, bd.w, bd.delta0
    ct = np.conj(t0)
    tg = (t0 - g) / (1 - np.conj(g) * t0)
    ctg = np.conj(tg)
    fz = f(z)
    Tp, Tm = T_plus(mu, z, f, cfg), T_minus(mu, z, f, cfg)
    g1 = phi_star_g1(mu, g, f, z, cfg)
    gm = g_minus(mu, g, f, z, cfg).values
    s = np.sqrt(1 - abs(g) ** 2)
    recomb = (1 - np.conj(g) * t0) / (1 - t0) * g1 + (1 - g * ct) / (1 - ct) * gm
    errs = {
        "delta0_sq_eq_w": d0**2 - np.abs(1 - t0) ** 2 * w,
        "v0_eq_2re": np.abs(1 - t0) ** 2 + d0**2 - 2 * np.real(1 - t0),
        "bracket": ctg + np.conj(g) - bd.T_minus_1 * ((1 - g) * ctg + np.conj(g) - 1),
        "T_minus_1": bd.T_minus_1 + ct / (1 - ct),
        "one_minus_theta0": (1 - t0) - 1 / bd.T_plus_1,
        "T_plus_minus_T_minus": Tp - Tm - w * fz,
        "recombination": s * w * fz - recomb,
    }
    return [IdentityRow(k, float(np.max(np.abs(v))), tol) for k, v in errs.items()]
