"""Standard normal distribution function, quantile and density."""
import numpy as np
from scipy.special import ndtr, ndtri

from ..errors import InvalidArgumentError

__all__ = ["norm_cdf", "norm_quantile", "norm_pdf"]

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _out(x):
    return x if np.ndim(x) else float(x)


def norm_cdf(x):
    return _out(ndtr(np.asarray(x, dtype=float)))


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return _out(_INV_SQRT_2PI * np.exp(-0.5 * x * x))


def norm_quantile(p):
    """Phi^{-1}(p) for 0 < p < 1."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0) | ~(p < 1)):
        raise InvalidArgumentError("norm_quantile needs 0 < p < 1")
    return _out(ndtri(p))
