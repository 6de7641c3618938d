"""Near-Gaussian exponential-family density and local geometry at a foot point."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..geometry import BoundarySurface
from ..tensors import PotentialTensors

__all__ = ["truncated_log_density", "natural_parameter", "LocalQuantities", "local_quantities_at"]

_LOG_2PI = np.log(2 * np.pi)


def natural_parameter(eta, tensors: PotentialTensors):
    eta = np.asarray(eta, dtype=float)
    return (
        eta
        + 0.5 * np.einsum("ijk,...j,...k->...i", tensors.phi3, eta, eta)
        + np.einsum("ijkl,...j,...k,...l->...i", tensors.phi4, eta, eta, eta) / 6
    )


def truncated_log_density(y, eta, tensors: PotentialTensors):
    """log f(y; eta) assembled from the expansions of theta, psi and h.

    ``y`` may carry leading batch axes. psi(0) is fixed to zero.
    """
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    f3, f4 = tensors.phi3, tensors.phi4
    p = tensors.p

    theta = natural_parameter(eta, tensors)
    psi = (
        0.5 * eta @ eta
        + np.einsum("ijk,i,j,k->", f3, eta, eta, eta) / 3
        + np.einsum("ijkl,i,j,k,l->", f4, eta, eta, eta, eta) / 8
    )
    quad = (
        np.eye(p)
        + 0.5 * np.einsum("ikl,jkl->ij", f3, f3)
        - 0.5 * np.einsum("ijkk->ij", f4)
    )
    h = (
        0.5 * p * _LOG_2PI
        + np.einsum("iijj->", f4) / 8
        - np.sum(f3 * f3) / 6
        - 0.5 * y @ np.einsum("ijj->i", f3)
        + 0.5 * np.einsum("...i,ij,...j->...", y, quad, y)
        + np.einsum("ijk,...i,...j,...k->...", f3, y, y, y) / 6
        + np.einsum("ijkl,...i,...j,...k,...l->...", f4, y, y, y, y) / 24
    )
    return y @ theta - psi - h


class LocalQuantities(NamedTuple):
    dhat: np.ndarray
    metric_inv: np.ndarray
    d1hat: float


def local_quantities_at(surface: BoundarySurface, tensors: PotentialTensors | None, u0):
    """Curvature, inverse tangent metric and their contraction at eta(u0)."""
    if tensors is None:
        tensors = PotentialTensors.zeros(surface.p)
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    P = surface.p - 1
    t = slice(0, P)
    d, e = surface.d, surface.e
    f3, f4 = tensors.phi3, tensors.phi4
    f3t = f3[t, t, t]
    f3tp = f3[t, t, P]
    f3pp = f3[t, P, P]

    dhat = d + 0.5 * d * (f3pp @ u0) + 3 * np.einsum("abc,c->ab", e, u0)
    second = (
        4 * np.einsum("ac,bd->abcd", d, d)
        - 2 * np.einsum("ac,bd->abcd", d, f3tp)
        - 2 * np.einsum("bd,ac->abcd", d, f3tp)
        - np.einsum("cd,ab->abcd", d, f3tp)
        - np.einsum("ace,bde->abcd", f3t, f3t)
        + 0.5 * f4[t, t, t, t]
    )
    metric_inv = (
        np.eye(P)
        - np.einsum("abc,c->ab", f3t, u0)
        - np.einsum("abcd,c,d->ab", second, u0, u0)
    )
    return LocalQuantities(dhat, metric_inv, float(np.sum(dhat * metric_inv)))
