"""Null rejection rates of bootstrap tests and their order of accuracy.

The true parameter sits on the boundary at eta(0, 0) = 0 and the test of
"eta in R" rejects when its p-value is at most ``alpha``. Every p-value here
decreases in the last coordinate of the observation, so for each tangent
quadrature node the rejection event is ``y_p >= t`` for a root ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from ..engines import solve_monotone
from ..errors import InvalidArgumentError
from ..geometry import BoundarySurface, project_points
from .calibration import double_bootstrap_prob, pivot_prob_numeric, pivot_z_formula
from .estimate import QuadratureEngine
from .probability import alpha1, tangent_rule

__all__ = [
    "SurfaceFamily",
    "OrderReport",
    "rejection_rate",
    "pivot_cdf",
    "accuracy_order_study",
    "fit_slope",
    "ORDER_METHODS",
    "NOISE_FLOOR",
]

ORDER_METHODS = ("naive", "pivot", "pivot_numeric", "double")
NOISE_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class SurfaceFamily:
    """Boundaries with ``d = eps * d0`` and ``e = eps^2 * e0``."""

    d0: np.ndarray
    e0: np.ndarray | None = None

    def __post_init__(self):
        d0 = np.atleast_2d(np.asarray(self.d0, dtype=float))
        k = d0.shape[0]
        e0 = np.zeros((k,) * 3) if self.e0 is None else np.asarray(self.e0, dtype=float).reshape((k,) * 3)
        object.__setattr__(self, "d0", d0)
        object.__setattr__(self, "e0", e0)
        self.at(1.0)  # validates symmetry

    @property
    def p(self):
        return self.d0.shape[0] + 1

    def at(self, eps):
        return BoundarySurface(self.p, eps * self.d0, eps**2 * self.e0)


def _pvalue_fn(method, surface, engine):
    """Map (y_a, y_p) batches to p-values, each decreasing in y_p."""
    if method == "naive":
        return lambda ya, t: alpha1(surface, np.column_stack([ya, t]), 1.0, engine)[0]
    if method == "pivot":
        def f(ya, t):
            u, v = project_points(surface, np.column_stack([ya, t]))
            return ndtr(-pivot_z_formula(surface, u, v))
        return f
    if method == "pivot_numeric":
        def f(ya, t):
            u, v = project_points(surface, np.column_stack([ya, t]))
            return pivot_prob_numeric(surface, u, v, engine)
        return f
    if method == "double":
        def f(ya, t):
            y = np.column_stack([ya, t])
            u, _ = project_points(surface, y)
            return double_bootstrap_prob(surface, u, alpha1(surface, y, 1.0, engine)[0], engine)
        return f
    raise InvalidArgumentError(f"unknown method {method!r}; expected one of {ORDER_METHODS}")


def _rejection_thresholds(method, surface, level, engine):
    nodes, weights = tangent_rule(engine, surface.p - 1, prune=True)
    pvalue = _pvalue_fn(method, surface, engine)
    target = np.full(len(weights), level)
    t0 = surface.height(nodes) - ndtri(level)
    t = solve_monotone(lambda t: pvalue(nodes, t), target, t0, increasing=False, step=0.5, xtol=1e-12)
    return t, weights


def rejection_rate(method, surface: BoundarySurface, alpha=0.05, engine: QuadratureEngine | None = None):
    """Pr{p-value <= alpha} when y ~ Normal(0, I), with 0 on the boundary."""
    if not 0 < alpha < 1:
        raise InvalidArgumentError("alpha must be in (0, 1)")
    engine = engine or QuadratureEngine()
    t, weights = _rejection_thresholds(method, surface, alpha, engine)
    return float(ndtr(-t) @ weights)


def pivot_cdf(surface: BoundarySurface, x, engine: QuadratureEngine | None = None):
    """Pr{pivot z <= x} under y ~ Normal(0, I), for each entry of ``x``."""
    engine = engine or QuadratureEngine()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(len(x))
    for i, xi in enumerate(x):
        # z <= x  iff  Phi(-z) >= Phi(-x)
        t, weights = _rejection_thresholds("pivot", surface, float(ndtr(-xi)), engine)
        out[i] = ndtr(t) @ weights
    return out


def fit_slope(eps, err, floor=NOISE_FLOOR):
    """Least-squares slope of log(err) on log(eps) over errors above ``floor``.

    Returns NaN when fewer than two errors clear the floor.
    """
    eps = np.asarray(eps, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = err > floor
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(eps[keep]), np.log(err[keep]), 1)[0])


@dataclass(frozen=True)
class OrderReport:
    method: str
    alpha: float
    eps: tuple
    rate: tuple
    error: tuple
    slope: float

    @property
    def below_floor(self):
        """True when the errors are too small to fit a slope."""
        return math.isnan(self.slope)


def accuracy_order_study(method, family: SurfaceFamily, alpha=0.05, eps_grid=(0.2, 0.1, 0.05),
                         engine: QuadratureEngine | None = None):
    """Rejection-rate error |rate - alpha| over ``eps_grid`` and its log-log slope."""
    eps = tuple(float(x) for x in eps_grid)
    if len(eps) < 3:
        raise InvalidArgumentError("the eps grid needs at least three points")
    if any(not x > 0 for x in eps):
        raise InvalidArgumentError("eps values must be positive")
    ratios = np.array(eps[1:]) / np.array(eps[:-1])
    if not np.allclose(ratios, ratios[0], rtol=1e-9) or np.isclose(ratios[0], 1.0):
        raise InvalidArgumentError("the eps grid must be geometrically spaced")
    rates = tuple(rejection_rate(method, family.at(x), alpha, engine) for x in eps)
    errors = tuple(abs(r - alpha) for r in rates)
    return OrderReport(method, float(alpha), eps, rates, errors, fit_slope(eps, errors))
