"""Closed-form asymptotic formulas: Gaussian integrals, cumulants, z_c, pivots."""
from ..tensors import PotentialTensors
from .density import LocalQuantities, local_quantities_at, natural_parameter, truncated_log_density
from .integrals import (
    g_moment,
    gaussian_even_moment,
    gaussian_poly_log_expectation,
    mgf_log_from_B,
    phi_c,
    phi_inverse_perturb,
)
from .scalars import GeometricScalars
from .zformula import (
    CoefficientsC,
    CoefficientsQ,
    CumulantSet,
    c_from_q,
    cornish_fisher_z,
    cumulants_of_w,
    scale_coefficients,
    scale_transform,
    v_infinity,
    z_c,
    z_infinity,
)

__all__ = [
    "PotentialTensors",
    "GeometricScalars",
    "CoefficientsC",
    "CoefficientsQ",
    "CumulantSet",
    "LocalQuantities",
    "gaussian_even_moment",
    "phi_c",
    "g_moment",
    "phi_inverse_perturb",
    "gaussian_poly_log_expectation",
    "mgf_log_from_B",
    "cumulants_of_w",
    "cornish_fisher_z",
    "scale_transform",
    "scale_coefficients",
    "z_c",
    "c_from_q",
    "v_infinity",
    "z_infinity",
    "local_quantities_at",
    "truncated_log_density",
    "natural_parameter",
]
