"""Cumulants of the modified signed distance and the z_c formula.

Coefficients ``c0, c2`` (and ``q0, q2``) are of order eps, ``c1, c3`` of
order eps^2. The order bookkeeping is a convention only; nothing here
enforces it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError
from ..geometry import BoundarySurface
from ..tensors import PotentialTensors
from .scalars import GeometricScalars

__all__ = [
    "CoefficientsC",
    "CoefficientsQ",
    "CumulantSet",
    "cumulants_of_w",
    "cornish_fisher_z",
    "scale_transform",
    "scale_coefficients",
    "z_c",
    "c_from_q",
    "v_infinity",
    "z_infinity",
]


@dataclass(frozen=True)
class CoefficientsC:
    """Coefficients of v = w - (c0 + c2 w^2) - (c1 w + c3 w^3)."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.c0, self.c1, self.c2, self.c3])):
            raise InvalidArgumentError("coefficients must be finite")


@dataclass(frozen=True)
class CoefficientsQ:
    """Perturbation z_q = z_inf + (q0 + q2 v^2) + (q1 v + q3 v^3)."""

    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.q0, self.q1, self.q2, self.q3])):
            raise InvalidArgumentError("coefficients must be finite")


@dataclass(frozen=True)
class CumulantSet:
    k1: float
    k2: float
    k3: float = 0.0
    k4: float = 0.0

    def __post_init__(self):
        if not self.k2 > 0:
            raise InvalidArgumentError(f"k2 must be positive, got {self.k2}")


def cumulants_of_w(gs: GeometricScalars, c: CoefficientsC, lam: float) -> CumulantSet:
    """First four cumulants of w under the null-anchored point eta(0, lam)."""
    daa, dab2, dabp = gs.daa, gs.dab2, gs.dabp
    p3, p4 = gs.p999, gs.p9999
    p99a2, p9ab2, p99aa = gs.p99a2, gs.p9ab2, gs.p99aa
    c0, c1, c2, c3 = c.c0, c.c1, c.c2, c.c3

    k1 = (
        daa + c0 + c2
        + (
            1 - 2 * dab2 + dabp - 0.5 * daa * p3 - 0.5 * p9ab2 - 0.625 * p99a2
            + 0.25 * p99aa + c1 + 2 * c0 * c2 + c2 * (2 * daa - p3) + 3 * c3
            + 6 * c2**2
        ) * lam
        + c2 * lam**2
        + (c3 + 2 * c2**2) * lam**3
    )
    k2 = (
        1 - 2 * dab2 + 2 * dabp - daa * p3 - p9ab2 - p99a2 + 0.5 * p99aa
        + 2 * c1 + 2 * c2 * (2 * daa - p3) + 6 * c3 + 4 * c0 * c2 + 14 * c2**2
        + (-p3 + 4 * c2) * lam
        + (
            0.25 * p99a2 + p3**2 - 0.5 * p4 - 4 * c2 * p3 + 6 * c3 + 16 * c2**2
        ) * lam**2
    )
    k3 = -p3 + 6 * c2 + (3 * p3**2 - p4 - 18 * c2 * p3 + 18 * c3 + 60 * c2**2) * lam
    k4 = 3 * p3**2 - p4 - 24 * c2 * p3 + 24 * c3 + 96 * c2**2
    return CumulantSet(k1, k2, k3, k4)


def cornish_fisher_z(k: CumulantSet, w):
    """Normal score Phi^{-1}(Pr{W <= w}) from the first four cumulants.

    Standard third-order normalizing Cornish-Fisher expansion in the
    standardized skewness and excess kurtosis.
    """
    if not k.k2 > 0:
        raise InvalidArgumentError("k2 must be positive")
    x = (np.asarray(w, dtype=float) - k.k1) / np.sqrt(k.k2)
    g1 = k.k3 / k.k2**1.5
    g2 = k.k4 / k.k2**2
    z = (
        x
        - g1 / 6 * (x * x - 1)
        - g2 / 24 * (x**3 - 3 * x)
        + g1 * g1 / 36 * (4 * x**3 - 7 * x)
    )
    return z if np.ndim(z) else float(z)


def scale_transform(surface: BoundarySurface, tensors: PotentialTensors, tau: float):
    """Problem seen by Y / tau: k-th potential derivatives pick up tau^(k-2).

    Tube coordinates map as (u, v) -> (u / tau, v / tau).
    """
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    return surface.scaled(tau, tau**2), tensors.scaled(tau, tau**2)


def scale_coefficients(c: CoefficientsC, tau: float) -> CoefficientsC:
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    return CoefficientsC(c.c0 / tau, c.c1, c.c2 * tau, c.c3 * tau**2)


def z_c(w, gs: GeometricScalars, c: CoefficientsC, lam: float, tau: float = 1.0):
    """Phi^{-1}(Pr{W <= w; lam, tau})."""
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    k = cumulants_of_w(gs.scaled(tau), scale_coefficients(c, tau), lam / tau)
    return cornish_fisher_z(k, np.asarray(w, dtype=float) / tau)


def c_from_q(q: CoefficientsQ, gs: GeometricScalars) -> CoefficientsC:
    """Inverse-series coefficients of the statistic z_q."""
    daa, p3, p4 = gs.daa, gs.p999, gs.p9999
    q0, q1, q2, q3 = q.q0, q.q1, q.q2, q.q3
    c0 = -daa - p3 / 6 + q0
    c1 = (
        gs.dab2 - gs.dabp + 0.5 * daa * p3 + 0.5 * gs.p9ab2 + 0.5 * gs.p99a2
        + 17 / 72 * p3**2 - 0.25 * gs.p99aa - 0.125 * p4
        + p3 * (q2 - q0) / 3 + q1 + 2 * daa * q2 - 2 * q0 * q2
    )
    c2 = p3 / 6 + q2
    c3 = -5 / 72 * p3**2 + p4 / 24 - 2 / 3 * p3 * q2 - 2 * q2**2 + q3
    return CoefficientsC(c0, c1, c2, c3)


def v_infinity(z, gs: GeometricScalars, lam: float, tau: float = 1.0):
    """Signed distance v with z_infinity(v; lam, tau) = z, to second order."""
    if not tau > 0:
        raise InvalidArgumentError("tau must be positive")
    z = np.asarray(z, dtype=float)
    daa, dab2, dabp = gs.daa, gs.dab2, gs.dabp
    p3, p4 = gs.p999, gs.p9999
    p99a2, p9ab2, p99aa = gs.p99a2, gs.p9ab2, gs.p99aa
    first = 1 - 0.5 * p3 * lam + (p99a2 / 8 + 3 / 8 * p3**2 - 0.25 * p4) * lam**2
    second = (
        daa + p3 / 6
        + (
            -2 * dab2 + 0.25 * p99aa + dabp - 0.5 * p9ab2 - 0.625 * p99a2
            - 0.5 * daa * p3 - p3**2 / 3 + p4 / 6
        ) * lam
        + z**2 * (-p3 / 6 + (p3**2 / 3 - p4 / 6) * lam)
    )
    third = (
        z * (
            -dab2 + 0.25 * p99aa + dabp - 0.5 * p9ab2 - 0.5 * p99a2
            - 0.5 * daa * p3 - 17 / 72 * p3**2 + p4 / 8
        )
        + z**3 * (5 / 72 * p3**2 - p4 / 24)
    )
    v = lam + tau * z * first + tau**2 * second + tau**3 * third
    return v if np.ndim(v) else float(v)


def z_infinity(v, gs: GeometricScalars, lam: float = 0.0, tau: float = 1.0):
    """Generalized pivot: z_c with all c_r = 0 at u = 0."""
    return z_c(v, gs, CoefficientsC(), lam, tau)
