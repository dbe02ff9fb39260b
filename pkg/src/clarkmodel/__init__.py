"""Clark measures, model spaces and Clark operators for rank-one unitary perturbations."""

from .boundary import (
    bounded_exterior_transform,
    g_minus,
    norm_sweep,
    phi_apply_grid,
    phi_star_g1,
    phi_star_universal_apply,
    singular_values_at_atoms,
)
from .cauchy import RadialLimitConfig, cauchy_R, cauchy_R1, cauchy_R2, discretize_Tr, radial_limit
from .charfunc import CharFunctionHandle, RationalInner, delta_gamma, rational_theta0, theta0, theta_fourier, theta_gamma
from .clark import (
    ClarkFamilyHandle,
    clark_measure,
    clark_operator,
    phi_star_alpha_gamma,
    phi_star_matrix,
    rigidity_check,
    v_alpha_matrix,
)
from .identities import identity_suite
from .measure import CircleMeasure, fourier_coefficient, load_measure, save_measure
from .model_space import ModelSpace, build_model, defect_vectors
from .opmatrix import OperatorMatrix, operator_norm, unitarity_residual
from .perturbation import build_U_gamma, defect_operators, spectral_measure

__version__ = "0.1.0"
