"""Contractions of the curvature and potential tensors."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from ..geometry import BoundarySurface
from ..tensors import PotentialTensors

__all__ = ["GeometricScalars", "TAU_POWER"]

# Power of the scale factor picked up by each scalar under Y -> Y / tau.
TAU_POWER = {
    "daa": 1,
    "dab2": 2,
    "dabp": 2,
    "p999": 1,
    "p9999": 2,
    "p99a2": 2,
    "p9ab2": 2,
    "p99aa": 2,
    "eaac": 2,
}


@dataclass(frozen=True)
class GeometricScalars:
    """The scalar contractions entering every expansion.

    ``daa`` is d^{aa}, ``dab2`` is (d^{ab})^2, ``dabp`` is d^{ab} phi^{abp},
    the ``p...`` fields are slices of the potential derivatives with ``9``
    standing for the normal index, and ``eaac`` is the vector e^{aac}.
    Everything defaults to zero so tests can switch on single terms.
    """

    daa: float = 0.0
    dab2: float = 0.0
    dabp: float = 0.0
    p999: float = 0.0
    p9999: float = 0.0
    p99a2: float = 0.0
    p9ab2: float = 0.0
    p99aa: float = 0.0
    eaac: tuple = ()

    @classmethod
    def from_geometry(cls, surface: BoundarySurface, tensors: PotentialTensors | None = None):
        if tensors is None:
            tensors = PotentialTensors.zeros(surface.p)
        P = surface.p - 1
        t = slice(0, P)
        d = surface.d
        f3, f4 = tensors.phi3, tensors.phi4
        return cls(
            daa=float(np.trace(d)),
            dab2=float(np.sum(d * d)),
            dabp=float(np.sum(d * f3[t, t, P])),
            p999=float(f3[P, P, P]),
            p9999=float(f4[P, P, P, P]),
            p99a2=float(np.sum(f3[t, P, P] ** 2)),
            p9ab2=float(np.sum(f3[t, t, P] ** 2)),
            p99aa=float(np.trace(f4[t, t, P, P])),
            eaac=tuple(float(x) for x in np.einsum("aac->c", surface.e)),
        )

    def scaled(self, tau):
        """Scalars of the problem rescaled by Y -> Y / tau."""
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            k = TAU_POWER[f.name]
            if f.name == "eaac":
                out[f.name] = tuple(x * tau**k for x in val)
            else:
                out[f.name] = val * tau**k
        return replace(self, **out)
