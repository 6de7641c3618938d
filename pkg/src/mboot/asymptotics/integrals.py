"""Closed-form Gaussian integrals and the polynomial-exponential expansions."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from ..errors import InvalidArgumentError
from ..tensors import is_symmetric

__all__ = [
    "gaussian_even_moment",
    "phi_c",
    "g_moment",
    "phi_inverse_perturb",
    "gaussian_poly_log_expectation",
    "mgf_log_from_B",
]


def gaussian_even_moment(r):
    """E[Z^(2r)] = (2r)! / (2^r r!) for a standard normal Z."""
    if int(r) != r or r < 0:
        raise InvalidArgumentError("r must be a nonnegative integer")
    r = int(r)
    if r > 15:
        raise InvalidArgumentError("r > 15 is not supported")
    return float(math.factorial(2 * r) // (2**r * math.factorial(r)))


def phi_c(a, b):
    """E[Phi(aZ + b)] = Phi(b / sqrt(1 + a^2))."""
    return float(ndtr(b / math.sqrt(1.0 + a * a)))


def g_moment(r, a, b):
    """int z^r f(az + b) f(z) dz / f(c) with c = b / sqrt(1 + a^2), for r = 0..5."""
    if r not in (0, 1, 2, 3, 4, 5):
        raise InvalidArgumentError("r must be in 0..5")
    s = 1.0 + a * a
    a2, b2 = a * a, b * b
    g0 = s**-0.5
    if r == 0:
        return g0
    if r == 1:
        return -a * b / s * g0
    if r == 2:
        return (1 + a2 * (1 + b2)) / s**2 * g0
    if r == 3:
        return -a * b * (3 + a2 * (3 + b2)) / s**3 * g0
    if r == 4:
        return (3 + 6 * a2 * (1 + b2) + a2 * a2 * (3 + 6 * b2 + b2 * b2)) / s**4 * g0
    return -a * b * (15 + 10 * a2 * (3 + b2) + a2 * a2 * (15 + 10 * b2 + b2 * b2)) / s**5 * g0


def phi_inverse_perturb(x, delta):
    """Second-order approximation of Phi^{-1}(Phi(x) + f(x) delta)."""
    return x + delta + 0.5 * x * delta * delta


def _sym(t, name, ndim, dim):
    t = np.asarray(t, dtype=float)
    if t.shape != (dim,) * ndim:
        raise InvalidArgumentError(f"{name} must have shape {(dim,) * ndim}")
    if not is_symmetric(t, atol=1e-14):
        raise InvalidArgumentError(f"{name} is not fully symmetric")
    return t


def gaussian_poly_log_expectation(A, Aa, Aab, Aabc, Aabcd):
    """log E exp(A + Aa x + Aab xx + Aabc xxx + Aabcd xxxx), x ~ N(0, I).

    Second-order formal expansion with Aa, Aab, Aabc of order eps and Aabcd
    of order eps^2; the remainder is O(eps^3).
    """
    Aa = np.atleast_1d(np.asarray(Aa, dtype=float))
    dim = Aa.size
    Aab = _sym(Aab, "Aab", 2, dim)
    Aabc = _sym(Aabc, "Aabc", 3, dim)
    Aabcd = _sym(Aabcd, "Aabcd", 4, dim)
    tr3 = np.einsum("aac->c", Aabc)
    return float(
        A
        + np.trace(Aab)
        + 3 * np.einsum("aabb->", Aabcd)
        + 0.5 * Aa @ Aa
        + np.sum(Aab * Aab)
        + 3 * Aa @ tr3
        + 4.5 * tr3 @ tr3
        + 3 * np.sum(Aabc * Aabc)
    )


def mgf_log_from_B(B, lam, t):
    """log int f(w - lam - t) exp(B0 + B1 w + ... + B4 w^4) dw, formally.

    ``f`` is the standard normal density. Adding ``lam*t + t^2/2`` gives the
    cumulant generating function of a variable with density proportional to
    f(w - lam) exp(sum B_r w^r).
    """
    B0, B1, B2, B3, B4 = (float(b) for b in B)
    m = lam + t
    return (
        B0 + B2 + 3 * B4 + 0.5 * B1**2 + B2**2 + 3 * B1 * B3 + 7.5 * B3**2
        + m * (B1 + 3 * B3 + 2 * B1 * B2 + 12 * B2 * B3)
        + m**2 * (B2 + 6 * B4 + 3 * B1 * B3 + 2 * B2**2 + 18 * B3**2)
        + m**3 * (B3 + 6 * B2 * B3)
        + m**4 * (B4 + 4.5 * B3**2)
    )
