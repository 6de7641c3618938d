"""Numeric substrate: normal distribution, quadrature, random streams."""
from .normal import norm_cdf, norm_pdf, norm_quantile
from .quadrature import (
    QuadratureRule,
    gauss_hermite,
    log_mean_exp_series,
    product_rule,
    trapezoid,
)
from .random import RandomSource, mc_mean, resolve_threads
from .roots import solve_monotone

__all__ = [
    "norm_cdf",
    "norm_pdf",
    "norm_quantile",
    "QuadratureRule",
    "gauss_hermite",
    "trapezoid",
    "product_rule",
    "log_mean_exp_series",
    "RandomSource",
    "mc_mean",
    "resolve_threads",
    "solve_monotone",
]
