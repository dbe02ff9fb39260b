"""Clark measures and Clark operators for atomic measures.

Everything here works in orthonormal atom bases: ``e_k = 1_{xi_k}/sqrt(m_k)``
in ``L^2(mu)`` and the Takenaka-Malmquist basis in ``K_theta``.

The Clark operator ``Phi*_gamma : L^2(mu) -> K_{theta_gamma}`` sends ``f`` to
the function

    g_1 = sqrt(1-|g|^2) / (1 - conj(g) theta_0) * R(f mu) / R mu,

which is rational with poles only at the reflections of the zeros of
``theta_gamma``.  Writing ``1 - conj(g) theta_0 = ((1-conj(g)) R mu + conj(g)) / R mu``
gives the column formula used below, free of any division by ``R mu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .charfunc import (
    NumericalCheckError,
    RationalInner,
    RootFindingError,
    _check_gamma,
    rational_theta0,
    require_atomic_probability,
)
from .measure import CircleMeasure, MeasureError, atoms_disjoint, circular_distance
from .model_space import ModelSpace, build_model, defect_vectors
from .opmatrix import OperatorMatrix, unitarity_residual
from .perturbation import build_U_gamma

#: tolerance for |alpha| = 1
ALPHA_TOL = 1e-10
#: residual tolerance of the operator checks
OPERATOR_TOL = 1e-8


class ConditioningError(RuntimeError):
    """The Clark mass system produced a negative mass."""


def check_alpha(alpha) -> complex:
    a = complex(alpha)
    if abs(abs(a) - 1) > ALPHA_TOL:
        raise ValueError("|alpha| must be 1 (got %r)" % abs(a))
    return a


def basis_id(mu: CircleMeasure, name: str = "mu") -> str:
    return "L2(%s)/atoms[%d]" % (name, mu.n_atoms)


# ---------------------------------------------------------------------------
# Clark measures


@dataclass(frozen=True)
class ClarkMeasureReport:
    """A Clark measure with its diagnostics.

    Attributes
    ----------
    measure : CircleMeasure
    system_residual : float
        Relative residual of the mass system.
    unimodularity : float
        ``max ||zeta| - 1|`` over the computed atoms.
    derivative_discrepancy : float
        ``max |m_j - 1/|theta_0'(zeta_j)||``, the classical weight formula.
    mass_defect : float
        ``|sum m_j - 1|``.
    """

    measure: CircleMeasure
    alpha: complex
    system_residual: float
    unimodularity: float
    derivative_discrepancy: float
    mass_defect: float


def _min_gap(pts: np.ndarray) -> float:
    if pts.size < 2:
        return 1.0
    ang = np.sort(np.mod(np.angle(pts), 2 * np.pi))
    return float(np.min(np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))))


def clark_measure_report(theta0: RationalInner, alpha, tries: int = 4) -> ClarkMeasureReport:
    """Clark measure ``mu_alpha`` of ``theta_0`` with diagnostics.

    Atoms are the solutions of ``theta_0 = alpha``.  Masses solve the real
    least-squares system ``sum_k m_k / (1 - conj(zeta_k) z_j) = 1/(1 - conj(alpha) theta_0(z_j))``
    at ``z_j = (1 - d) zeta_j``, which is diagonally dominant for small ``d``.
    """
    a = check_alpha(alpha)
    if theta0.degree < 1:
        raise ValueError("theta_0 must have degree >= 1")
    if abs(theta0(0.0)) > 1e-10:
        raise ValueError("theta_0(0) must vanish")
    zeta = theta0.solve(a)
    unim = float(np.max(np.abs(np.abs(zeta) - 1)))
    if unim > 1e-8:
        raise RootFindingError("theta_0 = alpha has a root off the circle: ||z|-1| = %.3g" % unim)
    zeta = zeta / np.abs(zeta)
    d = 1e-3 * min(1.0, _min_gap(zeta))
    for _ in range(tries):
        z = (1 - d) * zeta
        C = 1.0 / (1.0 - np.conj(zeta)[None, :] * z[:, None])
        rhs = 1.0 / (1.0 - np.conj(a) * theta0(z))
        A = np.vstack([C.real, C.imag])
        y = np.concatenate([rhs.real, rhs.imag])
        m = np.linalg.lstsq(A, y, rcond=None)[0]
        if np.all(m > 0):
            break
        d *= 0.1
    else:
        raise ConditioningError("Clark mass system gave a negative mass (min %.3g)" % m.min())
    resid = float(np.linalg.norm(C @ m - rhs) / np.linalg.norm(rhs))
    defect = abs(float(m.sum()) - 1)
    if defect > 1e-10:
        raise NumericalCheckError("Clark masses sum to 1 %+.3g" % (m.sum() - 1))
    classical = 1.0 / np.abs(theta0.derivative(zeta))
    mu_a = CircleMeasure(np.mod(np.angle(zeta), 2 * np.pi), m / m.sum()).sorted()
    return ClarkMeasureReport(mu_a, a, resid, unim, float(np.max(np.abs(m - classical))), defect)


def clark_measure(theta0: RationalInner, alpha) -> CircleMeasure:
    """The Clark measure ``mu_alpha`` of ``theta_0`` (an atomic probability measure)."""
    return clark_measure_report(theta0, alpha).measure


@dataclass(frozen=True)
class ClarkFamilyHandle:
    """The family ``{mu_alpha}`` generated by an atomic measure ``mu``."""

    mu: CircleMeasure
    theta0: Optional[RationalInner] = None
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        require_atomic_probability(self.mu)
        object.__setattr__(self, "mu", self.mu.sorted())
        if self.theta0 is None:
            object.__setattr__(self, "theta0", rational_theta0(self.mu))
        back = self.measure(1.0)
        err = max(
            float(np.max(circular_distance(back.angles, self.mu.angles))),
            float(np.max(np.abs(back.masses - self.mu.masses))),
        )
        if err > 1e-8:
            raise NumericalCheckError("mu_1 differs from mu by %.3g" % err)

    def measure(self, alpha) -> CircleMeasure:
        a = check_alpha(alpha)
        key = (round(a.real, 14), round(a.imag, 14))
        if key not in self.cache:
            self.cache[key] = clark_measure(self.theta0, a)
        return self.cache[key]


# ---------------------------------------------------------------------------
# Phi*_gamma and Phi*_{alpha, gamma}


def clark_columns(
    atoms: np.ndarray, masses: np.ndarray, shift: complex, gamma: complex, z: np.ndarray
) -> np.ndarray:
    """Samples at ``z`` of the images of the atom basis vectors.

    Column ``j`` is ``sqrt(1-|g|^2) sqrt(m_j) / (u_j ((1 - conj(g) s) R + conj(g) s))``
    with ``u_j = 1 - conj(xi_j) z`` and ``R = sum m_k / u_k``.  With
    ``s = 1`` this is ``Phi*_gamma``; with ``s = alpha`` and the Clark measure
    ``mu_alpha`` it is ``Phi*_{alpha, gamma}``.  Where ``z`` hits an atom
    exactly, column ``j`` takes its limit and the others vanish.
    """
    g = complex(gamma)
    cg = np.conj(g) * shift
    u = 1.0 - np.conj(atoms)[:, None] * z[None, :]
    hit = u == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.sum(masses[:, None] / u, axis=0)
        den = u * ((1 - cg) * R + cg)[None, :]
        out = np.sqrt(1 - abs(g) ** 2) * np.sqrt(masses)[:, None] / den
    if np.any(hit):
        col = np.any(hit, axis=0)
        out[:, col] = 0
        j, k = np.nonzero(hit)
        out[j, k] = np.sqrt(1 - abs(g) ** 2) / ((1 - cg) * np.sqrt(masses[j]))
    return out


@dataclass(frozen=True)
class ClarkOperator:
    """``Phi*_gamma`` (or ``Phi*_{alpha, gamma}``) as a matrix with its context.

    Attributes
    ----------
    mu : CircleMeasure
        Generating atomic measure.
    gamma, alpha : complex
    source : CircleMeasure
        ``mu_alpha``; the domain is ``L^2(source)``.
    theta : RationalInner
        ``theta_gamma``.
    model : ModelSpace
    matrix : OperatorMatrix
    U : ndarray
        ``U_gamma`` in the atom basis of ``L^2(source)``.
    """

    mu: CircleMeasure
    gamma: complex
    alpha: complex
    source: CircleMeasure
    theta: RationalInner
    model: ModelSpace = field(repr=False)
    matrix: OperatorMatrix = field(repr=False)
    U: np.ndarray = field(repr=False)
    membership_residual: float = 0.0

    def verify(self) -> dict:
        """Residuals of the defining properties (Frobenius or max norms)."""
        F = self.matrix.entries
        ms = self.model
        dv = defect_vectors(ms)
        nu = self.source
        sq = np.sqrt(nu.masses)
        b = sq.astype(complex)
        b1 = np.conj(nu.atoms) * sq
        M = ms.compression
        res = {
            "unitarity_residual": unitarity_residual(F),
            "intertwining_residual": float(np.linalg.norm(M @ F - F @ self.U)),
            "normalization_residual": float(
                max(np.linalg.norm(F @ b - dv.c), np.linalg.norm(F @ (self.alpha * b1) - dv.c1))
            ),
            "membership_residual": self.membership_residual,
        }
        if self.alpha == 1:
            # Phi* U_1 - M_z Phi* = (c - c_2) b_1^*, checked on the quadrature grid
            z = ms.nodes
            G = ms.synthesize(F.T)  # column images, shape (n, N)
            cz = ms.synthesize(dv.c)
            c2 = z * ms.synthesize(dv.c1)
            lhs = (nu.atoms[:, None] - z[None, :]) * G
            rhs = np.conj(b1)[:, None] * (cz - c2)[None, :]
            res["commutation_residual"] = float(np.sqrt(np.sum(np.mean(np.abs(lhs - rhs) ** 2, axis=1))))
        res.update({"defect_" + k: float(v) for k, v in dv.residuals.items()})
        return res

    def passed(self, tol: float = OPERATOR_TOL) -> bool:
        r = self.verify()
        keys = ("unitarity_residual", "intertwining_residual", "normalization_residual")
        return all(r[k] <= tol for k in keys)


def _operator(mu, gamma, alpha, source, theta, quad_size, U) -> ClarkOperator:
    ms = build_model(theta, quad_size)
    G = clark_columns(source.atoms, source.masses, alpha, gamma, ms.nodes)
    coeffs = ms.samples.conj() @ G.T / ms.quad_size
    back = coeffs.T @ ms.samples
    memb = float(np.sqrt(np.sum(np.mean(np.abs(G - back) ** 2, axis=1))))
    tag = "alpha" if alpha != 1 else "mu"
    mat = OperatorMatrix(coeffs, basis_id(source, tag), "K_theta/TM[%d]" % theta.degree)
    return ClarkOperator(mu, gamma, alpha, source, theta, ms, mat, U, memb)


def clark_operator(mu: CircleMeasure, gamma, quad_size: Optional[int] = None,
                   theta0: Optional[RationalInner] = None) -> ClarkOperator:
    """Build ``Phi*_gamma : L^2(mu) -> K_{theta_gamma}`` for atomic ``mu``.

    Raises
    ------
    QuadratureResolutionError
        If the model-space quadrature does not resolve ``theta_gamma``.
    """
    g = _check_gamma(gamma)
    require_atomic_probability(mu)
    mu = mu.sorted()
    t0 = rational_theta0(mu) if theta0 is None else theta0
    theta = t0.mobius(g)
    U = build_U_gamma(mu, g).matrix
    return _operator(mu, g, 1.0 + 0j, mu, theta, quad_size, np.asarray(U))


def phi_star_matrix(mu: CircleMeasure, gamma, quad_size: Optional[int] = None) -> OperatorMatrix:
    """Matrix of ``Phi*_gamma`` from the atom basis to the TM basis."""
    return clark_operator(mu, gamma, quad_size).matrix


def phi_star_alpha_gamma(mu: CircleMeasure, alpha, gamma, quad_size: Optional[int] = None,
                         family: Optional[ClarkFamilyHandle] = None) -> ClarkOperator:
    """``Phi*_{alpha, gamma} : L^2(mu_alpha) -> K_{theta_gamma}``.

    The intertwined operator is ``U_gamma`` written in the atom basis of
    ``mu_alpha``, obtained as ``V_alpha U_gamma V_alpha^*``.
    """
    a = check_alpha(alpha)
    g = _check_gamma(gamma)
    fam = family or ClarkFamilyHandle(mu)
    mu = fam.mu
    if a == 1:
        return clark_operator(mu, g, quad_size, fam.theta0)
    mu_a = fam.measure(a)
    V = v_alpha_matrix(mu, a, fam).entries
    U = V @ build_U_gamma(mu, g).matrix @ V.conj().T
    return _operator(mu, g, a, mu_a, fam.theta0.mobius(g), quad_size, U)


# ---------------------------------------------------------------------------
# V_alpha and rigidity


def _v_entries(mu: CircleMeasure, alpha: complex, targets: np.ndarray, tmass: np.ndarray) -> np.ndarray:
    """``sqrt(t_j) (1-alpha) sqrt(m_k) / (1 - conj(xi_k) z_j)``."""
    u = 1.0 - np.conj(mu.atoms)[None, :] * targets[:, None]
    if np.any(np.abs(u) < 1e-14):
        raise MeasureError("target atom coincides with an atom of mu")
    return np.sqrt(tmass)[:, None] * (1 - alpha) * np.sqrt(mu.masses)[None, :] / u


def v_alpha_matrix(mu: CircleMeasure, alpha, family: Optional[ClarkFamilyHandle] = None) -> OperatorMatrix:
    """``V_alpha : L^2(mu) -> L^2(mu_alpha)`` in the atom bases."""
    a = check_alpha(alpha)
    fam = family or ClarkFamilyHandle(mu)
    mu = fam.mu
    if a == 1:
        return OperatorMatrix(np.eye(mu.n_atoms), basis_id(mu), basis_id(mu, "alpha"))
    mu_a = fam.measure(a)
    if not atoms_disjoint(mu, mu_a):
        raise NumericalCheckError("atoms of mu and mu_alpha collide")
    return OperatorMatrix(_v_entries(mu, a, mu_a.atoms, mu_a.masses), basis_id(mu), basis_id(mu_a, "alpha"))


def v_alpha_report(mu: CircleMeasure, alpha, family: Optional[ClarkFamilyHandle] = None) -> dict:
    """Unitarity, intertwining and normalization residuals of ``V_alpha``."""
    a = check_alpha(alpha)
    fam = family or ClarkFamilyHandle(mu)
    mu = fam.mu
    V = v_alpha_matrix(mu, a, fam).entries
    mu_a = fam.measure(a)
    Ua = build_U_gamma(mu, a).matrix
    sq, sqa = np.sqrt(mu.masses), np.sqrt(mu_a.masses)
    b1 = np.conj(mu.atoms) * sq
    return {
        "unitarity_residual": unitarity_residual(V),
        "intertwining_residual": float(np.linalg.norm(V @ Ua - mu_a.atoms[:, None] * V)),
        "normalization_residual": float(
            max(np.linalg.norm(V @ sq - sqa), np.linalg.norm(V @ (np.conj(a) * b1) - np.conj(mu_a.atoms) * sqa))
        ),
    }


@dataclass(frozen=True)
class RigidityReport:
    """Outcome of :func:`rigidity_check`.

    ``h`` holds the values at the atoms of ``nu`` when the kernel test
    passes; ``measure_residual`` is ``max |h|^2 nu - mu_alpha|`` atom by atom.
    """

    commutation_residual: float
    sigma_min_V: float
    sigma_min_Vstar: float
    kernel_detected: bool
    h: Optional[np.ndarray]
    measure_residual: float
    unitary_residual: float
    message: str

    @property
    def passed(self) -> bool:
        return (not self.kernel_detected) and self.measure_residual <= 1e-8

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "commutation_residual", "sigma_min_V", "sigma_min_Vstar", "kernel_detected",
            "measure_residual", "unitary_residual", "message")}
        d["h_abs"] = None if self.h is None else [float(x) for x in np.abs(self.h)]
        d["passed"] = self.passed
        return d


def rigidity_check(mu: CircleMeasure, nu: CircleMeasure, alpha, kernel_tol: float = 1e-10,
                   family: Optional[ClarkFamilyHandle] = None) -> RigidityReport:
    """Test whether the ``V_alpha`` formula into ``L^2(nu)`` is ``M_{1/h}`` times a unitary."""
    a = check_alpha(alpha)
    if abs(a - 1) <= ALPHA_TOL:
        raise ValueError("rigidity check needs alpha != 1")
    fam = family or ClarkFamilyHandle(mu)
    mu = fam.mu
    if mu.n_atoms < 2:
        raise ValueError("mu must have at least two atoms")
    if not nu.is_atomic or nu.n_atoms == 0:
        raise MeasureError("nu must be a nonzero atomic measure")
    if not atoms_disjoint(mu, nu):
        raise MeasureError("atoms of nu must avoid the atoms of mu")
    nu = nu.sorted()
    V = _v_entries(mu, a, nu.atoms, nu.masses)
    VV = V @ V.conj().T
    Z = nu.atoms
    comm = float(np.linalg.norm(VV * Z[None, :] - Z[:, None] * VV))
    sv = np.linalg.svd(V, compute_uv=False)
    p, n = V.shape
    smin_V = float(sv[-1]) if p >= n else 0.0  # V has a kernel when p < n
    smin_Vs = float(sv[-1]) if n >= p else 0.0
    kernel = min(smin_V, smin_Vs) < kernel_tol
    if kernel:
        return RigidityReport(comm, smin_V, smin_Vs, True, None, float("inf"), float("inf"),
                              "rigidity hypothesis violated: V has a nontrivial kernel")
    d = np.real(np.diag(VV))
    h = 1.0 / np.sqrt(d)  # |V^*| = (V V^*)^{1/2} = M_{1/h}
    HV = h[:, None] * V
    mu_a = fam.measure(a)
    dist = circular_distance(nu.angles[:, None], mu_a.angles[None, :])
    j = np.argmin(dist, axis=1)
    target = np.where(dist[np.arange(p), j] <= 1e-8, mu_a.masses[j], 0.0)
    mres = float(np.max(np.abs(h**2 * nu.masses - target)))
    return RigidityReport(comm, smin_V, smin_Vs, False, h, mres, unitarity_residual(HV),
                          "ok" if mres <= 1e-8 else "|h|^2 nu differs from mu_alpha")
