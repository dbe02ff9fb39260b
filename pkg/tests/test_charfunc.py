import numpy as np
import pytest
from hypothesis import given

from clarkmodel.cauchy import BoundaryGuardError
from clarkmodel.charfunc import (
    CharFunctionHandle,
    RationalInner,
    delta_gamma,
    rational_theta0,
    theta0,
    theta_fourier,
    theta_gamma,
)
from clarkmodel.clark import clark_measure
from clarkmodel.instances import smooth_density, symmetric_atomic
from clarkmodel.measure import CircleMeasure, circular_distance, grid_points
from conftest import atomic_measures, disc_points
from oracles import THETA0_THREE_QUARTER, theta0_partial_fractions, theta_gamma_partial_fractions

D1 = CircleMeasure.dirac(0.0)
TWO = CircleMeasure([0.0, np.pi], [0.5, 0.5])
THREE_QUARTER = CircleMeasure([0.0, np.pi], [0.75, 0.25])
LEB = CircleMeasure.lebesgue(1024)
LAM = 0.7 * grid_points(8) * np.linspace(0.2, 1, 8)


def test_theta0_examples():
    assert np.max(np.abs(theta0(LEB, LAM))) < 1e-14
    assert np.max(np.abs(theta0(D1, LAM) - LAM)) < 1e-15
    assert np.max(np.abs(theta0(TWO, LAM) - LAM**2)) < 1e-15


def test_theta0_frozen_three_quarter():
    for lam, want in THETA0_THREE_QUARTER.items():
        assert abs(theta0(THREE_QUARTER, lam) - want) < 1e-15


def test_theta_gamma_examples():
    assert np.max(np.abs(theta_gamma(TWO, 0, LAM) - theta0(TWO, LAM))) == 0
    assert theta_gamma(D1, 0.5, 0.0) == pytest.approx(-0.5, abs=1e-15)
    assert abs(theta_gamma(D1, 0.5, 0.5)) < 1e-15


def test_theta_gamma_rejects_bad_gamma():
    with pytest.raises(ValueError):
        theta_gamma(D1, 1.0, 0.1)
    with pytest.raises(BoundaryGuardError):
        theta0(D1, 1.0)


def test_delta_examples():
    z = grid_points(32)
    assert np.all(delta_gamma(TWO, 0.3j, z) == 0)
    assert np.allclose(delta_gamma(CircleMeasure.lebesgue(256), 0, z[::8]), 1, atol=1e-12)
    assert np.allclose(delta_gamma(CircleMeasure.lebesgue(256), 0.5, z[::8]), np.sqrt(3) / 2, atol=1e-12)


def test_delta_on_density_is_checked_against_delta0_form():
    mu = smooth_density("von_mises", 1024)
    z = grid_points(1024)[::64]
    d = delta_gamma(mu, 0.3 - 0.4j, z)
    assert np.all((d >= 0) & (d <= 1))


def test_rational_examples():
    t = rational_theta0(D1)
    assert np.allclose(t.zeros, [0]) and t.constant == pytest.approx(1)
    t = rational_theta0(TWO)
    assert np.allclose(t.zeros, [0, 0], atol=1e-15)
    assert np.max(np.abs(t(LAM) - LAM**2)) < 1e-14
    t = rational_theta0(THREE_QUARTER)
    assert sorted(np.abs(t.zeros)) == pytest.approx([0, 0.5], abs=1e-15)
    assert np.max(np.abs(t(LAM) - LAM * (LAM + 0.5) / (1 + 0.5 * LAM))) < 1e-14
    assert t.innerness_residual() < 1e-13


def test_rational_to_dict_shape():
    d = rational_theta0(THREE_QUARTER).to_dict()
    assert set(d) == {"zeros", "constant", "num", "den"}
    assert len(d["zeros"]) == 2 and len(d["num"]) == 3


def test_theta_fourier_examples():
    assert theta_fourier(D1, 0, 1) == pytest.approx(1, abs=1e-14)
    assert theta_fourier(D1, 0.5, 1) == pytest.approx(0.75, abs=1e-14)
    for g in (0, 0.4, 0.2 - 0.7j):
        assert abs(theta_fourier(TWO, g, 1)) < 1e-14


def test_theta_fourier_rejects_k0():
    with pytest.raises(ValueError):
        theta_fourier(D1, 0, 0)


def test_rational_inner_validation():
    with pytest.raises(ValueError):
        RationalInner([1.0], 1)
    with pytest.raises(ValueError):
        RationalInner([0.5], 2)


def test_symmetric_measure_has_multiple_zero_at_origin(rng):
    mu = symmetric_atomic(rng, 4, 3)
    t = rational_theta0(mu)
    assert np.sum(np.abs(t.zeros) < 1e-12) >= 4
    lam = 0.6 * grid_points(16)
    ref = np.array([theta0_partial_fractions(mu.atoms, mu.masses, l) for l in lam])
    assert np.max(np.abs(t(lam) - ref)) < 1e-12


def test_handle_rejects_wrong_rational():
    with pytest.raises(Exception):
        CharFunctionHandle(D1, 0.5, RationalInner([0.0], 1))


@given(atomic_measures(max_atoms=12), disc_points())
def test_rational_matches_partial_fractions(mu, g):
    t = rational_theta0(mu)
    lam = 0.9 * grid_points(12) * 0.97
    ref = np.array([theta0_partial_fractions(mu.atoms, mu.masses, l) for l in lam])
    assert np.max(np.abs(t(lam) - ref)) < 1e-11
    assert abs(t(0.0)) < 1e-14
    assert t.innerness_residual() < 1e-9
    h = CharFunctionHandle(mu, g)
    refg = np.array([theta_gamma_partial_fractions(mu.atoms, mu.masses, g, l) for l in lam])
    assert np.max(np.abs(h(lam) - refg)) < 1e-10


@given(atomic_measures(), disc_points())
def test_theta_gamma_at_origin_and_contractive(mu, g):
    assert abs(theta_gamma(mu, g, 0.0) + g) < 1e-10
    lam = 0.99 * grid_points(64)
    assert np.max(np.abs(theta_gamma(mu, g, lam))) < 1


@given(atomic_measures(), disc_points())
def test_mobius_round_trip(mu, g):
    lam = 0.8 * grid_points(16)
    tg = theta_gamma(mu, g, lam)
    back = (tg + g) / (1 + np.conj(g) * tg)
    assert np.max(np.abs(back - theta0(mu, lam))) < 1e-12


@given(atomic_measures(max_atoms=10))
def test_clark_measure_at_one_recovers_mu(mu):
    back = clark_measure(rational_theta0(mu), 1.0)
    assert np.max(circular_distance(back.angles, mu.angles)) < 1e-8
    assert np.max(np.abs(back.masses - mu.masses)) < 1e-8
