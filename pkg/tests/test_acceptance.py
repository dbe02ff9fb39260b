"""One pass/fail line per acceptance criterion, at the required tolerances."""

import time
from itertools import combinations

import numpy as np
import pytest

from clarkmodel.charfunc import rational_theta0, theta0, theta_fourier, theta_gamma
from clarkmodel.clark import ClarkFamilyHandle, clark_measure, clark_operator, rigidity_check, v_alpha_report
from clarkmodel.boundary import exterior_transform_matrix, norm_sweep
from clarkmodel.identities import identity_suite
from clarkmodel.instances import (
    grid_measures,
    random_alpha,
    random_atomic,
    random_gamma,
    smooth_density,
    symmetric_atomic,
)
from clarkmodel.measure import CircleMeasure, circular_distance, fourier_coefficient, min_atom_distance
from clarkmodel.model_space import defect_vectors
from clarkmodel.opmatrix import operator_norm
from clarkmodel.perturbation import build_U_gamma, spectral_measure
from conftest import ACCEPTANCE, SESSION_START

KEYS = ("unitarity_residual", "intertwining_residual", "normalization_residual")


def record(k, ok, detail):
    line = "criterion %d: %s  %s" % (k, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE[k] = line
    print(line)
    assert ok, line


def interior_points(n=64, seed=1):
    rng = np.random.default_rng(seed)
    return 0.99 * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


def test_criterion_1_closed_forms():
    lam = interior_points()
    e1 = np.max(np.abs(theta0(CircleMeasure.dirac(0.0), lam) - lam))
    e2 = np.max(np.abs(theta0(CircleMeasure([0.0, np.pi], [0.5, 0.5]), lam) - lam**2))
    rng = np.random.default_rng(11)
    mu = random_atomic(rng, 5)
    e3 = max(abs(theta_gamma(mu, g, 0.0) + g) for g in (random_gamma(rng, 0.99) for _ in range(100)))
    record(1, e1 <= 1e-12 and e2 <= 1e-12 and e3 <= 1e-10,
           "dirac %.1e, two atoms %.1e, theta_gamma(0)+gamma %.1e" % (e1, e2, e3))


def test_criterion_2_clark_operator_suite():
    rng = np.random.default_rng(22)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        mu = random_atomic(rng, int(rng.integers(1, 21)))
        r = clark_operator(mu, random_gamma(rng, 0.95)).verify()
        worst = max(worst, *(r[k] for k in KEYS))
    dt = time.perf_counter() - t0
    record(2, worst <= 1e-8 and dt <= 10, "max residual %.1e over 50 instances in %.2f s" % (worst, dt))


def test_criterion_3_clark_spectral_duality():
    rng = np.random.default_rng(33)
    loc = mass = total = 0.0
    sep = np.inf
    for _ in range(5):
        mu = random_atomic(rng, int(rng.integers(1, 13)))
        t0 = rational_theta0(mu)
        measures = []
        for _ in range(16):
            a = random_alpha(rng)
            cm = clark_measure(t0, a)
            sm = spectral_measure(build_U_gamma(mu, a))
            loc = max(loc, np.max(circular_distance(cm.angles, sm.angles)))
            mass = max(mass, np.max(np.abs(cm.masses - sm.masses)))
            total = max(total, abs(cm.masses.sum() - 1))
            measures.append(cm)
        sep = min(sep, min(min_atom_distance(p, q) for p, q in combinations(measures, 2)))
    ok = loc <= 1e-8 and mass <= 1e-8 and total <= 1e-10 and sep > 1e-8
    record(3, ok, "atoms %.1e, masses %.1e, total mass %.1e, min separation %.1e" % (loc, mass, total, sep))


def test_criterion_4_fourier_criterion():
    rng = np.random.default_rng(44)
    e_hat = e_inner = 0.0
    for k in range(20):
        p = 2 + k % 4
        mu = symmetric_atomic(rng, p, int(rng.integers(1, 4)))
        n = p - 1
        assert all(abs(fourier_coefficient(mu, j)) < 1e-13 for j in range(1, n + 1))
        g = random_gamma(rng, 0.9)
        want = fourier_coefficient(mu, n + 1)
        e_hat = max(e_hat, abs(theta_fourier(mu, g, n + 1) - (1 - abs(g) ** 2) * want))
        op = clark_operator(mu, g)
        dv = defect_vectors(op.model)
        Mn_c = np.linalg.matrix_power(op.model.compression, n) @ dv.c
        e_inner = max(e_inner, abs(np.vdot(Mn_c, dv.c1) - want))
    record(4, e_hat <= 1e-10 and e_inner <= 1e-9, "Fourier coefficient %.1e, inner product %.1e" % (e_hat, e_inner))


def test_criterion_5_appendix_suite():
    rng = np.random.default_rng(55)
    v_worst = mres = 0.0
    flagged = True
    for _ in range(20):
        mu = random_atomic(rng, int(rng.integers(2, 13)))
        a = random_alpha(rng)
        fam = ClarkFamilyHandle(mu)
        r = v_alpha_report(mu, a, fam)
        v_worst = max(v_worst, *(r[k] for k in KEYS))
        ma = fam.measure(a)
        scale = rng.uniform(0.25, 4, ma.n_atoms)
        rep = rigidity_check(mu, CircleMeasure(ma.angles, ma.masses * scale), a, family=fam)
        mres = max(mres, np.max(np.abs(np.abs(rep.h) ** 2 * ma.masses * scale - ma.masses)))
        flagged &= rep.passed
        gone = int(rng.integers(ma.n_atoms))
        keep = np.arange(ma.n_atoms) != gone
        rep = rigidity_check(mu, CircleMeasure(ma.angles[keep], ma.masses[keep]), a, family=fam)
        flagged &= rep.kernel_detected and not rep.passed
    ok = v_worst <= 1e-9 and mres <= 1e-8 and flagged
    record(5, ok, "V_alpha %.1e, rescaled mass %.1e, verdicts and kernel flags %s" % (
        v_worst, mres, "ok" if flagged else "wrong"))


def test_criterion_6_grid_identities():
    t0 = time.perf_counter()
    worst = 0.0
    for mu in grid_measures(4096).values():
        for g in (0.0, 0.3 + 0.4j):
            rows = identity_suite(mu, g, grid_n=4096)
            worst = max(worst, max(r.max_error for r in rows))
    dt = time.perf_counter() - t0
    record(6, worst <= 1e-6 and dt <= 30, "max pointwise error %.1e in %.2f s" % (worst, dt))


def test_criterion_7_norm_sweep():
    rng = np.random.default_rng(77)
    radii = [0.5, 0.7, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0]
    instances = [random_atomic(rng, 6), random_atomic(rng, 12)] + [
        smooth_density(k, 512) for k in ("cos", "trig", "von_mises")]
    worst = max(max(r.norm for r in norm_sweep(mu, random_gamma(rng, 0.9), radii, target_n=256))
                for mu in instances)
    ext = max(operator_norm(exterior_transform_matrix(mu)) for mu in instances if not mu.is_atomic)
    record(7, worst <= 4 + 1e-6 and ext <= 1 + 1e-6, "max ||T_r|| %.4f, exterior norm %.6f" % (worst, ext))


@pytest.mark.runs_last
def test_criterion_8_wall_clock():
    dt = time.perf_counter() - SESSION_START
    record(8, dt <= 60, "suite wall clock %.1f s" % dt)
