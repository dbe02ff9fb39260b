"""Measures on the unit circle.

A :class:`CircleMeasure` is a finite list of atoms plus an optional density
sampled on a uniform grid.  The density samples are values of the
Radon-Nikodym derivative against normalized Lebesgue measure ``m`` at the
points ``exp(2*pi*i*j/N)``.

Fourier coefficients follow the convention

    mu_hat(k) = integral of conj(xi)**k dmu(xi),

so that the Cauchy transform expands as ``R mu(z) = sum_{k>=0} mu_hat(k) z**k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

TWO_PI = 2.0 * np.pi

#: minimal circular distance between two atoms of one measure
ATOM_SEPARATION = 1e-12
#: tolerance for "total mass equals one"
MASS_TOL = 1e-10


class MeasureError(ValueError):
    """Raised for invalid measure data."""


def circular_distance(a, b):
    """Distance between angles ``a`` and ``b`` along the circle, in [0, pi]."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def grid_points(n: int) -> np.ndarray:
    """The ``n`` points ``exp(2*pi*i*j/n)``, ``j = 0..n-1``."""
    return np.exp(1j * TWO_PI * np.arange(n) / n)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CircleMeasure:
    """Finite positive measure on the unit circle: atoms plus grid density.

    Parameters
    ----------
    angles : array_like
        Atom locations in radians; reduced to ``[0, 2*pi)``.
    masses : array_like
        Positive atom masses.
    density : array_like or None
        Nonnegative samples of ``d mu_ac / dm`` on the uniform grid.

    Notes
    -----
    The total mass is not forced to be one, so the same type can carry
    weights such as ``|h|^2 nu`` or an unnormalized target measure.  Use
    :meth:`require_probability` where a probability measure is needed.
    """

    angles: np.ndarray
    masses: np.ndarray
    density: Optional[np.ndarray] = None
    _order: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ang = np.mod(np.atleast_1d(np.asarray(self.angles, dtype=float)), TWO_PI)
        # angles like 2*pi - 1e-17 round to 2*pi under mod
        ang[ang >= TWO_PI] = 0.0
        mas = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if ang.ndim != 1 or ang.shape != mas.shape:
            raise MeasureError("angles and masses must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(ang)) and np.all(np.isfinite(mas))):
            raise MeasureError("atom data must be finite")
        if np.any(mas <= 0):
            raise MeasureError("atom masses must be positive")
        if ang.size > 1:
            s = np.sort(ang)
            gaps = np.diff(np.concatenate([s, [s[0] + TWO_PI]]))
            if gaps.min() <= ATOM_SEPARATION:
                raise MeasureError("atoms closer than %g" % ATOM_SEPARATION)
        dens = None
        if self.density is not None:
            dens = np.asarray(self.density, dtype=float)
            if dens.ndim != 1 or dens.size < 1:
                raise MeasureError("density must be a nonempty 1-d sample array")
            if not np.all(np.isfinite(dens)) or np.any(dens < 0):
                raise MeasureError("density samples must be finite and nonnegative")
            dens = _frozen(dens)
        if ang.size == 0 and dens is None:
            raise MeasureError("measure has neither atoms nor density")
        object.__setattr__(self, "angles", _frozen(ang))
        object.__setattr__(self, "masses", _frozen(mas))
        object.__setattr__(self, "density", dens)
        object.__setattr__(self, "_order", np.argsort(ang, kind="stable"))

    # constructors -------------------------------------------------------
    @classmethod
    def from_atoms(cls, angles, masses) -> "CircleMeasure":
        return cls(angles, masses, None)

    @classmethod
    def from_density(cls, samples) -> "CircleMeasure":
        return cls(np.empty(0), np.empty(0), samples)

    @classmethod
    def lebesgue(cls, n: int = 1024) -> "CircleMeasure":
        """Normalized Lebesgue measure sampled on ``n`` grid points."""
        return cls.from_density(np.ones(n))

    @classmethod
    def dirac(cls, angle: float = 0.0) -> "CircleMeasure":
        return cls.from_atoms([angle], [1.0])

    # basic properties ---------------------------------------------------
    @property
    def n_atoms(self) -> int:
        return int(self.angles.size)

    @property
    def atoms(self) -> np.ndarray:
        """Atom locations as unit complex numbers."""
        return np.exp(1j * self.angles)

    @property
    def grid_size(self) -> int:
        return 0 if self.density is None else int(self.density.size)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    @property
    def has_density(self) -> bool:
        return self.density is not None

    def grid(self) -> np.ndarray:
        """Density grid points on the circle (empty when there is no density)."""
        return grid_points(self.grid_size)

    def atom_part(self) -> Optional["CircleMeasure"]:
        if self.n_atoms == 0:
            return None
        return CircleMeasure(self.angles, self.masses, None)

    def density_part(self) -> Optional["CircleMeasure"]:
        if self.density is None:
            return None
        return CircleMeasure.from_density(self.density)

    def require_probability(self, tol: float = MASS_TOL) -> "CircleMeasure":
        if abs(total_mass(self) - 1.0) > tol:
            raise MeasureError("expected a probability measure, total mass is %r" % total_mass(self))
        return self

    def require_atomic(self) -> "CircleMeasure":
        if not self.is_atomic:
            raise MeasureError("operation requires a purely atomic measure")
        return self

    def sorted(self) -> "CircleMeasure":
        """Same measure with atoms sorted by angle."""
        o = self._order
        return CircleMeasure(self.angles[o], self.masses[o], self.density)

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        atoms = [{"angle": float(a), "mass": float(m)} for a, m in zip(self.angles, self.masses)]
        dens = None
        if self.density is not None:
            dens = {"n": int(self.density.size), "samples": [float(s) for s in self.density]}
        return {"atoms": atoms, "density": dens}

    @classmethod
    def from_dict(cls, d: dict) -> "CircleMeasure":
        try:
            atoms = d.get("atoms") or []
            ang = [float(a["angle"]) for a in atoms]
            mas = [float(a["mass"]) for a in atoms]
            dens = d.get("density")
            samples = None
            if dens is not None:
                samples = [float(s) for s in dens["samples"]]
                if int(dens["n"]) != len(samples):
                    raise MeasureError("density.n does not match the number of samples")
        except (KeyError, TypeError, AttributeError) as exc:
            raise MeasureError("malformed measure JSON: %s" % exc) from exc
        return cls(np.array(ang), np.array(mas), samples)


def total_mass(mu: CircleMeasure) -> float:
    """Sum of atom masses plus the mean of the density samples."""
    m = float(np.sum(mu.masses))
    if mu.density is not None:
        m += float(np.mean(mu.density))
    return m


def normalize(mu: CircleMeasure) -> CircleMeasure:
    """Rescale atoms and density so the total mass is one."""
    t = total_mass(mu)
    if not t > 0:
        raise MeasureError("cannot normalize a measure of zero mass")
    dens = None if mu.density is None else mu.density / t
    return CircleMeasure(mu.angles, mu.masses / t, dens)


def fourier_coefficient(mu: CircleMeasure, k: int) -> complex:
    """``mu_hat(k) = integral conj(xi)**k dmu(xi)``.

    Exact over the atoms, trapezoid rule over the density grid.
    """
    k = int(k)
    val = np.sum(mu.masses * np.exp(-1j * k * mu.angles))
    if mu.density is not None:
        n = mu.density.size
        j = np.arange(n)
        # reduce k*j mod n before forming the phase to keep it exact for large k
        val += np.mean(mu.density * np.exp(-1j * TWO_PI * ((k * j) % n) / n))
    return complex(val)


def atoms_disjoint(mu: CircleMeasure, nu: CircleMeasure, tol: float = 1e-8) -> bool:
    """True iff every atom of ``mu`` is farther than ``tol`` from every atom of ``nu``."""
    if mu.n_atoms == 0 or nu.n_atoms == 0:
        return True
    d = circular_distance(mu.angles[:, None], nu.angles[None, :])
    return bool(d.min() > tol)


def min_atom_distance(mu: CircleMeasure, nu: CircleMeasure) -> float:
    if mu.n_atoms == 0 or nu.n_atoms == 0:
        return float("inf")
    return float(circular_distance(mu.angles[:, None], nu.angles[None, :]).min())


def save_measure(mu: CircleMeasure, path) -> None:
    Path(path).write_text(json.dumps(mu.to_dict(), indent=1) + "\n")


def load_measure(path) -> CircleMeasure:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MeasureError("invalid JSON in %s: %s" % (path, exc)) from exc
    return CircleMeasure.from_dict(data)
