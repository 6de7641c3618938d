"""One-, two- and three-step multiscale bootstrap probabilities.

Resampling is the Gaussian model: a resample of ``y`` at scale ``tau`` is
``Y* ~ Normal(y, tau^2 I)`` and the bootstrap probability is the chance that
``Y*`` lands in the region R below the boundary graph. A k-step probability
nests k such resamplings, the innermost one being a bootstrap probability.

For p = 2 the quadrature engine also gives the one-step probability under
the truncated near-Gaussian density, see :func:`density_bp1`.
"""
from __future__ import annotations

import math

import numpy as np

from .._ext import kernels
from ..engines import gauss_hermite, mc_mean, norm_pdf, product_rule
from ..errors import InvalidArgumentError
from ..geometry import BoundarySurface
from ..tensors import PotentialTensors
from .estimate import MonteCarloEngine, QuadratureEngine, make_estimate, resolve_engine

__all__ = ["bp1", "bp2", "bp3", "multistep", "tangent_rule", "alpha1", "density_bp1"]

# Upper bound on the number of inner draws held in memory per Monte Carlo chunk.
_MC_BLOCK = 1 << 21


def _check_y(surface, y):
    y = np.asarray(y, dtype=float)
    if y.shape != (surface.p,):
        raise InvalidArgumentError(f"y must have length {surface.p}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidArgumentError("y must be finite")
    return y


def _check_taus(taus):
    taus = tuple(float(t) for t in taus)
    if not taus or any(not (t > 0 and math.isfinite(t)) for t in taus):
        raise InvalidArgumentError("scales must be positive and finite")
    return taus


def tangent_rule(engine: QuadratureEngine, k: int, prune=False):
    """Gauss-Hermite product rule over the k tangent coordinates.

    One tangent axis uses ``engine.nodes``; more axes use
    ``engine.tangent_nodes`` per axis to keep the product small. With
    ``prune`` the nodes with weight below ``engine.min_weight`` are dropped,
    which keeps projections away from the far tails where the tube
    coordinates stop being defined.
    """
    n = engine.nodes if k == 1 else engine.tangent_nodes
    nodes, weights = product_rule(gauss_hermite(n), k)
    if prune:
        keep = weights >= engine.min_weight
        nodes, weights = nodes[keep], weights[keep]
    return nodes, weights


def alpha1(surface: BoundarySurface, y, tau, engine: QuadratureEngine | None = None, rule=None):
    """Bootstrap probability at the rows of ``y`` by tangent quadrature.

    Returns ``(prob, density)`` where density is minus the derivative of the
    probability with respect to the last coordinate. ``rule`` overrides the
    tangent ``(nodes, weights)``.
    """
    engine = engine or QuadratureEngine()
    y = np.atleast_2d(np.asarray(y, dtype=float))
    nodes, weights = rule if rule is not None else tangent_rule(engine, surface.p - 1)
    return kernels.graph_prob(
        np.ascontiguousarray(y[:, :-1]),
        np.ascontiguousarray(y[:, -1]),
        float(tau),
        nodes,
        weights,
        surface.d,
        surface.e,
    )


def _grid_nested_p2(surface, y, taus, engine):
    # Memoize the innermost probability on a trapezoid grid around y, then
    # apply each outer Gaussian smoothing as a separable matrix product.
    h = min(taus) / engine.grid_density
    half = engine.grid_sigmas * sum(taus)
    m = int(math.ceil(half / h))
    offsets = np.arange(-m, m + 1) * h
    ga, gp = np.meshgrid(y[0] + offsets, y[1] + offsets, indexing="ij")
    pts = np.stack([ga.ravel(), gp.ravel()], axis=1)
    alpha = alpha1(surface, pts, taus[-1], engine)[0].reshape(ga.shape)
    diff = offsets[:, None] - offsets[None, :]
    for tau in reversed(taus[1:-1]):
        kern = h * norm_pdf(diff / tau) / tau
        alpha = kern @ alpha @ kern.T
    kvec = h * norm_pdf(offsets / taus[0]) / taus[0]
    return float(kvec @ alpha @ kvec)


def _nested_gh(surface, y, taus, engine):
    # Every level, the innermost tangent rule included, uses nested_nodes per
    # axis; the point count grows like nested_nodes^(p k).
    rule = gauss_hermite(engine.nested_nodes)
    nodes, weights = product_rule(rule, surface.p)
    pts = y[None, :]
    wts = np.ones(1)
    for tau in taus[:-1]:
        pts = (pts[:, None, :] + tau * nodes[None, :, :]).reshape(-1, surface.p)
        wts = np.multiply.outer(wts, weights).ravel()
    inner = product_rule(rule, surface.p - 1)
    return float(wts @ alpha1(surface, pts, taus[-1], engine, rule=inner)[0])


def _quadrature_prob(surface, y, taus, engine):
    if len(taus) == 1:
        return float(alpha1(surface, y, taus[0], engine)[0][0])
    if surface.p == 2:
        return _grid_nested_p2(surface, y, taus, engine)
    return _nested_gh(surface, y, taus, engine)


def density_bp1(surface: BoundarySurface, tensors: PotentialTensors, y, tau, nodes=160, half_width=8.0):
    """One-step probability of R when ``Y*`` follows the truncated density at ``y``.

    Works in the problem seen by ``Y* / tau``. The density is integrated by
    Gauss-Legendre rules on a box of ``half_width`` around ``y / tau``, the
    normal rule running up to the boundary, and normalised by the box mass.
    Only ``p = 2`` is supported.
    """
    from ..asymptotics import scale_transform, truncated_log_density

    if surface.p != 2 or tensors.p != 2:
        raise InvalidArgumentError("the truncated-density bootstrap needs p = 2")
    y = _check_y(surface, y)
    (tau,) = _check_taus((tau,))
    surf, ten = scale_transform(surface, tensors, tau)
    eta = y / tau
    x, w = np.polynomial.legendre.leggauss(nodes)
    xa = eta[0] + half_width * x
    wa = half_width * w
    lo, hi = eta[1] - half_width, eta[1] + half_width
    top = np.clip(surf.height(xa[:, None]), lo, hi)

    def mass(upper):
        half = 0.5 * (upper - lo)
        xp = lo + half[:, None] * (x[None, :] + 1)
        pts = np.stack([np.broadcast_to(xa[:, None], xp.shape), xp], axis=-1)
        dens = np.exp(truncated_log_density(pts, eta, ten))
        return wa @ (dens @ w * half)

    total = mass(np.full(nodes, hi))
    if not total > 0:
        raise InvalidArgumentError("the truncated density has no mass near y")
    return float(mass(top) / total)


def _mc_prob(surface, y, taus, engine: MonteCarloEngine):
    p = surface.p
    k = len(taus)
    sizes = [engine.level(i) for i in range(k)]
    per_outer = int(np.prod(sizes[1:], dtype=np.int64)) if k > 1 else 1
    d, e = surface.d, surface.e

    def sampler(gen, n):
        pts = y + taus[0] * gen.standard_normal((n, p))
        if k == 1:
            return (pts[:, -1] <= surface.height(pts[:, :-1])).astype(float)
        for i in range(1, k - 1):
            pts = (pts[:, None, :] + taus[i] * gen.standard_normal((len(pts), sizes[i], p))).reshape(-1, p)
        z = gen.standard_normal((len(pts), sizes[-1], p))
        inner = kernels.graph_inner_means(
            np.ascontiguousarray(pts[:, :-1]), np.ascontiguousarray(pts[:, -1]), taus[-1], z, d, e
        )
        return inner.reshape(n, -1).mean(axis=1)

    chunk = max(1, min(4096, _MC_BLOCK // per_outer))
    return mc_mean(sizes[0], sampler, engine.rs, engine.threads, chunk)


def multistep(y, taus, surface: BoundarySurface, engine=None, tensors: PotentialTensors | None = None):
    """k-step multiscale bootstrap probability for the scales ``taus``.

    ``taus[0]`` is the outermost resampling scale and ``taus[-1]`` the scale
    of the innermost bootstrap probability. The z-value is ``-Phi^{-1}(prob)``.
    Non-Gaussian ``tensors`` are supported for one step at p = 2 with the
    quadrature engine.
    """
    engine = resolve_engine(engine)
    y = _check_y(surface, y)
    taus = _check_taus(taus)
    method = f"bp{len(taus)}"
    if tensors is not None and not tensors.is_gaussian:
        if isinstance(engine, MonteCarloEngine) or len(taus) != 1 or surface.p != 2:
            raise InvalidArgumentError(
                "non-Gaussian resampling is available for one step at p = 2 with the quadrature engine"
            )
        return make_estimate(density_bp1(surface, tensors, y, taus[0]), method, taus)
    if isinstance(engine, MonteCarloEngine):
        prob, se = _mc_prob(surface, y, taus, engine)
        return make_estimate(prob, method, taus, se=se, engine="mc")
    return make_estimate(_quadrature_prob(surface, y, taus, engine), method, taus)


def bp1(y, tau, surface: BoundarySurface, engine=None, tensors: PotentialTensors | None = None):
    """Bootstrap probability of R at scale ``tau``.

    Examples
    --------
    >>> from mboot.geometry import BoundarySurface
    >>> round(bp1([0.0, 1.0], 1.0, BoundarySurface.flat(2)).prob, 7)
    0.1586553
    """
    return multistep(y, (tau,), surface, engine, tensors)


def bp2(y, tau1, tau2, surface: BoundarySurface, engine=None):
    """Two-step probability: mean of bp1(Y*, tau2) over Y* ~ Normal(y, tau1^2 I)."""
    return multistep(y, (tau1, tau2), surface, engine)


def bp3(y, tau1, tau2, tau3, surface: BoundarySurface, engine=None):
    """Three-step probability: one more resampling level around :func:`bp2`."""
    return multistep(y, (tau1, tau2, tau3), surface, engine)
