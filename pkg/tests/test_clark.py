import numpy as np
import pytest
from hypothesis import assume, given

from clarkmodel.charfunc import RationalInner, rational_theta0
from clarkmodel.clark import (
    ClarkFamilyHandle,
    clark_columns,
    clark_measure,
    clark_measure_report,
    clark_operator,
    phi_star_alpha_gamma,
    phi_star_matrix,
    rigidity_check,
    v_alpha_matrix,
    v_alpha_report,
)
from clarkmodel.measure import CircleMeasure, MeasureError, circular_distance
from clarkmodel.model_space import build_model, defect_vectors
from clarkmodel.opmatrix import unitarity_residual
from clarkmodel.perturbation import build_U_gamma, spectral_representation
from conftest import atomic_measures, disc_points, unimodular
from oracles import (
    CLARK_THREE_QUARTER_I,
    PHI_STAR_TWO_ATOMS,
    V_TWO_ATOMS,
    brute_force_phi_star,
    clark_masses_derivative,
    kernel_phi_star,
    perturbation_matrix,
    tm_compression,
)

D1 = CircleMeasure.dirac(0.0)
TWO = CircleMeasure([0.0, np.pi], [0.5, 0.5])
THREE_QUARTER = CircleMeasure([0.0, np.pi], [0.75, 0.25])
KEYS = ("unitarity_residual", "intertwining_residual", "normalization_residual")


# ---------------------------------------------------------------------------
# Clark measures


def test_clark_measure_examples():
    m = clark_measure(RationalInner([0.0], 1), 1j)
    assert m.angles == pytest.approx([np.pi / 2]) and m.masses == pytest.approx([1])
    m = clark_measure(RationalInner([0.0, 0.0], 1), 1)
    assert m.angles == pytest.approx([0, np.pi], abs=1e-12) and m.masses == pytest.approx([0.5, 0.5])
    m = clark_measure(RationalInner([0.0, 0.0], 1), -1)
    assert m.angles == pytest.approx([np.pi / 2, 3 * np.pi / 2]) and m.masses == pytest.approx([0.5, 0.5])


def test_clark_measure_frozen_three_quarter():
    m = clark_measure(rational_theta0(THREE_QUARTER), 1j)
    for (a, w), a2, w2 in zip(CLARK_THREE_QUARTER_I, m.angles, m.masses):
        assert abs(a - a2) < 1e-12 and abs(w - w2) < 1e-12


def test_clark_measure_rejects_bad_input():
    with pytest.raises(ValueError):
        clark_measure(RationalInner([0.0], 1), 0.5)
    with pytest.raises(ValueError):
        clark_measure(RationalInner([0.5], 1), 1)


@given(atomic_measures(max_atoms=12), unimodular())
def test_clark_report_diagnostics(mu, a):
    t0 = rational_theta0(mu)
    rep = clark_measure_report(t0, a)
    assert rep.mass_defect <= 1e-10 and rep.unimodularity <= 1e-8
    assert rep.system_residual < 1e-10
    assert rep.derivative_discrepancy < 1e-8
    oracle = clark_masses_derivative(t0.zeros, t0.constant, rep.measure.atoms)
    assert np.max(np.abs(oracle - rep.measure.masses)) < 1e-8


def test_family_handle_caches():
    fam = ClarkFamilyHandle(TWO)
    assert fam.measure(-1) is fam.measure(-1 + 0j)
    assert fam.measure(1).masses == pytest.approx([0.5, 0.5])


# ---------------------------------------------------------------------------
# Phi*_gamma


def test_phi_star_examples():
    assert np.allclose(phi_star_matrix(D1, 0).entries, [[1]])
    F = phi_star_matrix(TWO, 0)
    assert np.max(np.abs(F.entries - PHI_STAR_TWO_ATOMS)) < 1e-14
    assert F.source_basis_id.startswith("L2(mu)") and F.target_basis_id.startswith("K_theta")


def test_phi_star_two_atoms_brute_force():
    U = perturbation_matrix([1, -1], [0.5, 0.5], 0)
    b = np.sqrt([0.5, 0.5]) + 0j
    b1 = np.array([1, -1]) * b
    X = brute_force_phi_star(U, b, b1, tm_compression([0, 0]), np.array([1, 0]), np.array([0, 1]))
    assert np.max(np.abs(X - PHI_STAR_TWO_ATOMS)) < 1e-14


@given(atomic_measures(max_atoms=12), disc_points())
def test_phi_star_residuals(mu, g):
    op = clark_operator(mu, g)
    r = op.verify()
    assert all(r[k] <= 1e-8 for k in KEYS)
    assert r["commutation_residual"] <= 1e-8
    assert r["membership_residual"] <= 1e-8


@given(atomic_measures(max_atoms=10), disc_points())
def test_phi_star_matches_kernel_oracle(mu, g):
    op = clark_operator(mu, g)
    th = op.theta
    K = kernel_phi_star(mu.atoms, mu.masses, th.zeros, th.constant)
    assert np.max(np.abs(op.matrix.entries - K)) < 1e-9


@given(atomic_measures(max_atoms=6), disc_points())
def test_phi_star_matches_brute_force(mu, g):
    op = clark_operator(mu, g)
    dv = defect_vectors(op.model)
    b = np.sqrt(mu.masses) + 0j
    X = brute_force_phi_star(op.U, b, np.conj(mu.atoms) * b, op.model.compression, dv.c, dv.c1)
    assert np.max(np.abs(op.matrix.entries - X)) < 1e-8


def test_clark_columns_atom_limit():
    xi = np.exp(1j * np.array([0.0, 2.0, 4.0]))
    m = np.array([0.2, 0.3, 0.5])
    G = clark_columns(xi, m, 1.0, 0.3, xi[1:2])
    near = clark_columns(xi, m, 1.0, 0.3, xi[1:2] * (1 - 1e-9))
    assert np.allclose(G, near, atol=1e-6)


# ---------------------------------------------------------------------------
# Phi*_{alpha, gamma} and V_alpha


def test_alpha_one_reduces_to_phi_star():
    A = phi_star_alpha_gamma(TWO, 1, 0.3).matrix.entries
    assert np.array_equal(A, phi_star_matrix(TWO, 0.3).entries)


def test_alpha_gamma_single_atom():
    op = phi_star_alpha_gamma(D1, 1j, 0)
    assert op.matrix.entries.shape == (1, 1)
    assert abs(abs(op.matrix.entries[0, 0]) - 1) < 1e-14
    assert op.source.angles == pytest.approx([np.pi / 2])


def test_alpha_gamma_two_atoms_chain():
    op = phi_star_alpha_gamma(TWO, -1, 0)
    assert op.source.angles == pytest.approx([np.pi / 2, 3 * np.pi / 2])
    assert unitarity_residual(op.matrix) < 1e-14
    chain = PHI_STAR_TWO_ATOMS @ V_TWO_ATOMS.conj().T
    assert np.max(np.abs(op.matrix.entries - chain)) < 1e-13


def test_v_alpha_examples():
    assert np.array_equal(v_alpha_matrix(TWO, 1).entries, np.eye(2))
    assert np.allclose(v_alpha_matrix(D1, 1j).entries, [[1]])
    V = v_alpha_matrix(TWO, -1).entries
    assert np.max(np.abs(V - V_TWO_ATOMS)) < 1e-14


@given(atomic_measures(max_atoms=12), unimodular())
def test_v_alpha_properties(mu, a):
    assume(abs(a - 1) > 1e-6)
    fam = ClarkFamilyHandle(mu)
    r = v_alpha_report(mu, a, fam)
    assert all(r[k] <= 1e-9 for k in KEYS)
    _, Z = spectral_representation(build_U_gamma(fam.mu, a))
    assert np.max(np.abs(v_alpha_matrix(mu, a, fam).entries - Z.conj().T)) < 1e-9


@given(atomic_measures(max_atoms=10), unimodular(), disc_points())
def test_alpha_gamma_chain_and_residuals(mu, a, g):
    assume(abs(a - 1) > 1e-6)
    fam = ClarkFamilyHandle(mu)
    op = phi_star_alpha_gamma(mu, a, g, family=fam)
    r = op.verify()
    assert all(r[k] <= 1e-8 for k in KEYS)
    chain = phi_star_matrix(fam.mu, g).entries @ v_alpha_matrix(mu, a, fam).entries.conj().T
    assert np.max(np.abs(op.matrix.entries - chain)) < 1e-8


# ---------------------------------------------------------------------------
# rigidity


def test_rigidity_exact_target():
    mu = CircleMeasure([0.2, 1.9, 3.5, 5.0], [0.1, 0.2, 0.3, 0.4])
    a = np.exp(0.7j)
    fam = ClarkFamilyHandle(mu)
    rep = rigidity_check(mu, fam.measure(a), a, family=fam)
    assert rep.passed and not rep.kernel_detected
    assert np.allclose(np.abs(rep.h), 1, atol=1e-9)
    assert rep.commutation_residual < 1e-9 and rep.unitary_residual < 1e-9


def test_rigidity_rescaled_target():
    mu = CircleMeasure([0.2, 1.9, 3.5, 5.0], [0.1, 0.2, 0.3, 0.4])
    a = np.exp(2.1j)
    fam = ClarkFamilyHandle(mu)
    ma = fam.measure(a)
    scale = np.array([1, 4, 0.25, 2.5])
    nu = CircleMeasure(ma.angles, ma.masses * scale)
    rep = rigidity_check(mu, nu, a, family=fam)
    assert rep.passed
    assert np.allclose(np.abs(rep.h) ** 2, 1 / scale, rtol=1e-9)
    assert rep.measure_residual < 1e-8


def test_rigidity_deleted_atom_flags_kernel():
    mu = CircleMeasure([0.2, 1.9, 3.5], [0.3, 0.3, 0.4])
    a = -1
    fam = ClarkFamilyHandle(mu)
    ma = fam.measure(a)
    nu = CircleMeasure(ma.angles[1:], ma.masses[1:])
    rep = rigidity_check(mu, nu, a, family=fam)
    assert rep.kernel_detected and not rep.passed
    assert "kernel" in rep.message


def test_rigidity_wrong_support_fails():
    mu = CircleMeasure([0.2, 1.9, 3.5], [0.3, 0.3, 0.4])
    a = np.exp(1j)
    ma = ClarkFamilyHandle(mu).measure(a)
    nu = CircleMeasure(ma.angles + 0.05, ma.masses)
    rep = rigidity_check(mu, nu, a)
    assert not rep.passed
    assert rep.commutation_residual > 1e-6


def test_rigidity_input_validation():
    with pytest.raises(ValueError):
        rigidity_check(TWO, CircleMeasure.dirac(1.0), 1)
    with pytest.raises(ValueError):
        rigidity_check(D1, CircleMeasure.dirac(1.0), -1)
    with pytest.raises(MeasureError):
        rigidity_check(TWO, CircleMeasure.dirac(0.0), -1)


@given(atomic_measures(min_atoms=2, max_atoms=10), unimodular())
def test_rigidity_random_rescaling(mu, a):
    assume(abs(a - 1) > 1e-3)
    fam = ClarkFamilyHandle(mu)
    ma = fam.measure(a)
    scale = np.random.default_rng(mu.n_atoms).uniform(0.25, 4, mu.n_atoms)
    rep = rigidity_check(mu, CircleMeasure(ma.angles, ma.masses * scale), a, family=fam)
    assert rep.passed
    back = CircleMeasure(ma.angles, np.abs(rep.h) ** 2 * ma.masses * scale)
    assert np.max(circular_distance(back.angles, ma.angles)) == 0
    assert np.max(np.abs(back.masses - ma.masses)) < 1e-8
