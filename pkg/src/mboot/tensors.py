"""Symmetric tensor helpers and the derivatives of the potential at the origin."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["PotentialTensors", "is_symmetric", "symmetrize", "check_symmetric"]


def is_symmetric(t, atol=0.0):
    """Return True if ``t`` is invariant under every permutation of its axes."""
    t = np.asarray(t, dtype=float)
    for perm in itertools.permutations(range(t.ndim)):
        if not np.allclose(t, np.transpose(t, perm), rtol=0.0, atol=atol):
            return False
    return True


def symmetrize(t):
    """Average ``t`` over all permutations of its axes."""
    t = np.asarray(t, dtype=float)
    perms = list(itertools.permutations(range(t.ndim)))
    return sum(np.transpose(t, p) for p in perms) / len(perms)


def check_symmetric(t, name, ndim, size, atol=0.0):
    t = np.asarray(t, dtype=float)
    if t.shape != (size,) * ndim:
        raise InvalidArgumentError(
            f"{name} must have shape {(size,) * ndim}, got {t.shape}"
        )
    if not np.all(np.isfinite(t)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    if not is_symmetric(t, atol=atol):
        raise InvalidArgumentError(f"{name} is not fully symmetric")
    return t


@dataclass(frozen=True, eq=False)
class PotentialTensors:
    """Third and fourth derivatives of the potential at the origin.

    The metric at the origin is the identity. Away from the origin the
    potential is taken to be exactly its quartic Taylor polynomial, so the
    metric at ``eta`` is ``I + phi3 . eta + phi4 . eta eta / 2``.
    The last axis index (``p - 1``) is the normal direction.
    """

    p: int
    phi3: np.ndarray
    phi4: np.ndarray

    def __post_init__(self):
        if int(self.p) < 2:
            raise InvalidArgumentError("p must be at least 2")
        object.__setattr__(self, "p", int(self.p))
        phi3 = check_symmetric(self.phi3, "phi3", 3, self.p, atol=1e-14)
        phi4 = check_symmetric(self.phi4, "phi4", 4, self.p, atol=1e-14)
        phi3.setflags(write=False)
        phi4.setflags(write=False)
        object.__setattr__(self, "phi3", phi3)
        object.__setattr__(self, "phi4", phi4)

    @classmethod
    def zeros(cls, p):
        return cls(p, np.zeros((p,) * 3), np.zeros((p,) * 4))

    @property
    def is_gaussian(self):
        return not (np.any(self.phi3) or np.any(self.phi4))

    def scaled(self, s3, s4):
        """Return tensors with phi3 multiplied by ``s3`` and phi4 by ``s4``."""
        return PotentialTensors(self.p, self.phi3 * s3, self.phi4 * s4)

    def metric(self, eta):
        """Second derivative of the potential at ``eta``."""
        eta = np.asarray(eta, dtype=float)
        return (
            np.eye(self.p)
            + np.einsum("ijk,k->ij", self.phi3, eta)
            + 0.5 * np.einsum("ijkl,k,l->ij", self.phi4, eta, eta)
        )

    def potential(self, eta):
        eta = np.asarray(eta, dtype=float)
        return (
            0.5 * eta @ eta
            + np.einsum("ijk,i,j,k->", self.phi3, eta, eta, eta) / 6.0
            + np.einsum("ijkl,i,j,k,l->", self.phi4, eta, eta, eta, eta) / 24.0
        )
