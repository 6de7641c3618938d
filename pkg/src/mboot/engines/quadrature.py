"""Quadrature rules for integrals against the standard normal density."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from ..errors import InvalidArgumentError

# numpy's Hermite_e weights overflow above roughly 370 nodes.
MAX_GH_ORDER = 360

__all__ = [
    "QuadratureRule",
    "gauss_hermite",
    "trapezoid",
    "product_rule",
    "log_mean_exp_series",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def expect(self, values):
        """Weighted sum over the last axis of ``values``."""
        return np.asarray(values) @ self.weights


@lru_cache(maxsize=64)
def _hermite(n):
    x, w = hermegauss(n)
    w = w / w.sum()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_hermite(n: int) -> QuadratureRule:
    """Probabilists' Gauss-Hermite rule: sum w_i g(x_i) ~ int g(z) f(z) dz.

    Exact for polynomials of degree below 2n. Weights sum to one.
    """
    if int(n) != n or not 2 <= n <= MAX_GH_ORDER:
        raise InvalidArgumentError(f"Gauss-Hermite order must be in 2..{MAX_GH_ORDER}")
    x, w = _hermite(int(n))
    return QuadratureRule(x, w, "gauss-hermite-probabilist")


def trapezoid(a: float, b: float, n: int) -> QuadratureRule:
    """Composite trapezoid rule on [a, b] with n equally spaced nodes."""
    if n < 2 or not b > a:
        raise InvalidArgumentError("trapezoid needs n >= 2 and b > a")
    x = np.linspace(a, b, n)
    w = np.full(n, (b - a) / (n - 1))
    w[[0, -1]] *= 0.5
    return QuadratureRule(x, w, "trapezoid")


def product_rule(rule: QuadratureRule, dim: int):
    """Tensor-product nodes (m**dim, dim) and weights (m**dim,)."""
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*([rule.nodes] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.ones(1)
    for _ in range(dim):
        weights = np.multiply.outer(weights, rule.weights).ravel()
    return nodes, weights


def log_mean_exp_series(values, weights, order=12):
    """log of sum_k E[Q^k] / k! for k <= ``order``.

    ``values`` holds a polynomial Q at quadrature nodes that integrate Q^order
    exactly, so the result is the formal expansion of log E exp(Q) with a
    remainder of the size of the first omitted term. The constant part of Q
    should be removed by the caller.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    total = 0.0
    power = np.ones_like(values)
    for k in range(order + 1):
        total += float(weights @ power) / math.factorial(k)
        power = power * values
    return math.log(total)
