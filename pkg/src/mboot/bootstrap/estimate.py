"""Result type, scale schedules and engine settings."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..engines import RandomSource, norm_quantile
from ..errors import InvalidArgumentError

__all__ = [
    "ScaleSchedule",
    "BootstrapEstimate",
    "QuadratureEngine",
    "MonteCarloEngine",
    "resolve_engine",
    "scale_from_resample_size",
    "make_estimate",
    "PROB_CLAMP",
    "DEFAULT_SCALES",
]

PROB_CLAMP = 1e-12
DEFAULT_SCALES = (1 / math.sqrt(2), 1 / 1.2, 1.0, 1.2, math.sqrt(2))
METHODS = ("bp1", "bp2", "bp3", "naive", "double", "pivot")


def scale_from_resample_size(n, m):
    """tau = sqrt(n / m) for resample size m out of sample size n."""
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise InvalidArgumentError("n and m must be positive integers")
    return math.sqrt(n / m)


@dataclass(frozen=True)
class ScaleSchedule:
    scales: tuple = DEFAULT_SCALES

    def __post_init__(self):
        scales = tuple(float(s) for s in np.atleast_1d(self.scales))
        if not scales or any(not s > 0 for s in scales):
            raise InvalidArgumentError("scales must be strictly positive")
        object.__setattr__(self, "scales", scales)

    @classmethod
    def from_sizes(cls, n, sizes):
        return cls(tuple(scale_from_resample_size(n, m) for m in sizes))

    def __iter__(self):
        return iter(self.scales)

    def __len__(self):
        return len(self.scales)


@dataclass(frozen=True)
class BootstrapEstimate:
    """A bootstrap probability with its z-value ``z = -Phi^{-1}(prob)``."""

    prob: float
    z: float
    method: str
    scales: tuple
    se: float = 0.0
    engine: str = "quadrature"  # "quadrature", "mc" or "formula"
    clamped: bool = False


def make_estimate(prob, method, scales, se=0.0, engine="quadrature"):
    """Build an estimate, clamping prob into [1e-12, 1 - 1e-12] before Phi^{-1}."""
    prob = float(prob)
    if not -1e-9 <= prob <= 1 + 1e-9:
        raise InvalidArgumentError(f"probability out of range: {prob}")
    prob = min(max(prob, 0.0), 1.0)
    clipped = min(max(prob, PROB_CLAMP), 1 - PROB_CLAMP)
    clamped = clipped != prob
    if clamped:
        warnings.warn(f"{method}: probability {prob} clamped before Phi^-1", RuntimeWarning)
    return BootstrapEstimate(
        prob=prob,
        z=-norm_quantile(clipped),
        method=method,
        scales=tuple(float(s) for s in scales),
        se=float(se),
        engine=engine,
        clamped=clamped,
    )


@dataclass(frozen=True)
class QuadratureEngine:
    """Quadrature settings.

    ``nodes`` is the Gauss-Hermite order per axis for one-step
    probabilities and outer integrals. Nested levels in p = 2 are memoized
    on a shared trapezoid grid with spacing ``min(tau) / grid_density``
    covering ``grid_sigmas`` total standard deviations; for p > 2 the levels
    are nested Gauss-Hermite products with ``nested_nodes`` per axis.
    Bootstrap probabilities over two or more tangent axes use
    ``tangent_nodes`` per axis.
    Calibration roots skip tangent nodes with weight below ``min_weight``.

    A cubic term makes the boundary turn back far from the origin; at large
    scales resolving that feature to 1e-9 takes about 200 nodes.
    """

    nodes: int = 120
    grid_density: float = 4.0
    grid_sigmas: float = 8.5
    nested_nodes: int = 12
    tangent_nodes: int = 32
    min_weight: float = 1e-24
    kind: str = field(default="quadrature", init=False)


@dataclass(frozen=True)
class MonteCarloEngine:
    """Monte Carlo settings; ``draws[i]`` is the sample size at nesting level i."""

    draws: tuple = (100_000, 1_000)
    rs: RandomSource = RandomSource(0)
    threads: int | None = None
    kind: str = field(default="mc", init=False)

    def __post_init__(self):
        draws = tuple(int(d) for d in np.atleast_1d(self.draws))
        if not draws or min(draws) < 2:
            raise InvalidArgumentError("each level needs at least two draws")
        object.__setattr__(self, "draws", draws)

    def level(self, i):
        """Draws at level ``i``; deeper levels reuse the last entry."""
        return self.draws[min(i, len(self.draws) - 1)]


def resolve_engine(engine):
    if engine is None or engine in ("quadrature", "quad"):
        return QuadratureEngine()
    if engine == "mc":
        return MonteCarloEngine()
    if isinstance(engine, (QuadratureEngine, MonteCarloEngine)):
        return engine
    raise InvalidArgumentError(f"unknown engine {engine!r}")
