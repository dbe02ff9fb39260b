"""Random and named test instances."""

from __future__ import annotations

import numpy as np

from .measure import CircleMeasure


def random_atomic(rng: np.random.Generator, n: int, gap_fraction: float = 0.5) -> CircleMeasure:
    """``n`` atoms with neighbouring gaps at least ``gap_fraction * 2 pi / n``.

    Masses are uniform on ``[0.5, 1.5]`` before normalization.
    """
    if not 0 <= gap_fraction < 1:
        raise ValueError("gap_fraction must be in [0, 1)")
    gmin = gap_fraction * 2 * np.pi / n
    gaps = gmin + (2 * np.pi - n * gmin) * rng.dirichlet(np.ones(n))
    ang = np.mod(rng.uniform(0, 2 * np.pi) + np.cumsum(gaps), 2 * np.pi)
    m = rng.uniform(0.5, 1.5, n)
    return CircleMeasure(ang, m / m.sum()).sorted()


def random_gamma(rng: np.random.Generator, rmax: float = 0.95) -> complex:
    """Uniform point of the disc of radius ``rmax``."""
    return complex(rmax * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))


def random_alpha(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.uniform()))


def symmetric_atomic(rng: np.random.Generator, p: int, orbits: int) -> CircleMeasure:
    """Measure invariant under rotation by ``2 pi / p``.

    Its Fourier coefficients vanish off the multiples of ``p``, so the first
    nonzero positive one is ``mu_hat(p)`` (generically).
    """
    base = rng.uniform(0, 2 * np.pi / p, orbits)
    w = rng.uniform(0.5, 1.5, orbits)
    ang = np.mod(base[:, None] + 2 * np.pi * np.arange(p)[None, :] / p, 2 * np.pi).ravel()
    m = np.repeat(w, p)
    return CircleMeasure(ang, m / m.sum()).sorted()


SMOOTH_DENSITIES = {
    "cos": lambda t: 1 + 0.5 * np.cos(t),
    "trig": lambda t: 1 + 0.3 * np.sin(2 * t) + 0.2 * np.cos(3 * t),
    "von_mises": lambda t: np.exp(0.8 * np.cos(t - 1)) / np.i0(0.8),
}


def smooth_density(name: str, n: int = 4096) -> CircleMeasure:
    """Named smooth probability density sampled on ``n`` points."""
    t = 2 * np.pi * np.arange(n) / n
    return CircleMeasure.from_density(SMOOTH_DENSITIES[name](t))


def grid_measures(n: int = 4096) -> dict:
    """Lebesgue measure and the smooth densities on ``n`` points."""
    out = {"lebesgue": CircleMeasure.lebesgue(n)}
    out.update({k: smooth_density(k, n) for k in SMOOTH_DENSITIES})
    return out
