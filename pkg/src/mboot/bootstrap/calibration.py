"""Null-anchored calibration: the pivot z-value and the double bootstrap.

Both calibrate against the boundary point eta(u_hat, 0) nearest to the
observation, so a large positive z is evidence that ``y`` lies outside R.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

from .._ext import kernels
from ..asymptotics import GeometricScalars, local_quantities_at, z_infinity
from ..engines import mc_mean, solve_monotone
from ..errors import InvalidArgumentError
from ..geometry import BoundarySurface, parallel_surface_height, project, project_points
from ..tensors import PotentialTensors
from .estimate import PROB_CLAMP, MonteCarloEngine, QuadratureEngine, make_estimate, resolve_engine
from .probability import _check_y, alpha1, tangent_rule

__all__ = [
    "pivot_z",
    "pivot",
    "pivot_z_formula",
    "pivot_prob_numeric",
    "double_bootstrap_z",
    "double_bootstrap_prob",
]


def _local_scalars(surface, tensors, u):
    """Geometric scalars at the foot point ``u`` with d^{aa} and (d^{ab})^2 localized."""
    if tensors is None or tensors.is_gaussian:
        g = surface.gradient(u)
        s = np.sqrt(1 + g @ g)
        dhat = -0.5 * surface.hessian(u) / s
        m = np.linalg.inv(np.eye(len(u)) + np.outer(g, g))
        d1 = float(np.sum(dhat * m))
    else:
        lq = local_quantities_at(surface, tensors, u)
        dhat, m, d1 = lq.dhat, lq.metric_inv, lq.d1hat
    dab2 = float(np.trace(dhat @ m @ dhat @ m))
    base = GeometricScalars.from_geometry(surface, tensors)
    # Third derivative along the normal, taken from the model at eta(u, 0).
    P = surface.p - 1
    eta = surface.point(u)
    p999 = float(tensors.phi3[P, P, P] + tensors.phi4[P, P, P] @ eta) if tensors is not None else 0.0
    return GeometricScalars(
        daa=d1,
        dab2=dab2,
        dabp=base.dabp,
        p999=p999,
        p9999=base.p9999,
        p99a2=base.p99a2,
        p9ab2=base.p9ab2,
        p99aa=base.p99aa,
        eaac=base.eaac,
    )


def pivot_z_formula(surface: BoundarySurface, u, v, tensors: PotentialTensors | None = None):
    """Closed-form pivot at tube coordinates ``(u, v)``; batch over rows of ``u``."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.array([z_infinity(vi, _local_scalars(surface, tensors, ui), 0.0, 1.0) for ui, vi in zip(u, v)])
    return out


def pivot_prob_numeric(surface: BoundarySurface, u, v, engine: QuadratureEngine | None = None):
    """Pr{V >= v} under Y ~ Normal(eta(u, 0), I) by tangent quadrature; batch over rows."""
    engine = engine or QuadratureEngine()
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    nodes, weights = tangent_rule(engine, surface.p - 1, prune=True)
    m = len(weights)
    ya = (u[:, None, :] + nodes[None, :, :]).reshape(-1, surface.p - 1)
    t = parallel_surface_height(surface, ya, np.repeat(v, m))
    center = np.repeat(surface.height(u), m)
    return ndtr(center - t).reshape(len(u), m) @ weights


def pivot_z(y, surface: BoundarySurface, tensors: PotentialTensors | None = None, method="formula",
            engine: QuadratureEngine | None = None):
    """Pivot z-value of the observation ``y``.

    ``method="formula"`` uses the third-order closed form localized at the
    projection; ``method="quadrature"`` computes ``-Phi^{-1}(Pr{V >= v_hat})``
    under the Gaussian model centred at the projection.

    Examples
    --------
    >>> from mboot.geometry import BoundarySurface
    >>> pivot_z([0.4, 1.3], BoundarySurface.flat(2))
    1.3
    """
    y = _check_y(surface, y)
    gaussian = tensors is None or tensors.is_gaussian
    if gaussian:
        u, v = project_points(surface, y[None, :])
    else:
        tp = project(surface, tensors, y)
        u, v = tp.u[None, :], np.array([tp.v])
    if method == "formula":
        return float(pivot_z_formula(surface, u, v, tensors)[0])
    if method == "quadrature":
        if not gaussian:
            raise InvalidArgumentError("the quadrature pivot supports the Gaussian model only")
        prob = float(pivot_prob_numeric(surface, u, v, engine)[0])
        return float(-ndtri(min(max(prob, PROB_CLAMP), 1 - PROB_CLAMP)))
    raise InvalidArgumentError(f"unknown pivot method {method!r}")


def pivot(y, surface: BoundarySurface, tensors: PotentialTensors | None = None, method="formula",
          engine: QuadratureEngine | None = None):
    """:func:`pivot_z` wrapped as an estimate with ``prob = Phi(-z)``."""
    z = pivot_z(y, surface, tensors, method, engine)
    return make_estimate(ndtr(-z), "pivot", (1.0,), engine=method)


def double_bootstrap_prob(surface: BoundarySurface, u, level, engine: QuadratureEngine | None = None):
    """Pr{bp1(Y, 1) <= level} for Y ~ Normal(eta(u, 0), I); batch over rows.

    bp1 decreases in the last coordinate, so for each tangent node the event
    is ``Y_p >= t`` with ``t`` the root of ``bp1(y_a, t) = level``.
    """
    engine = engine or QuadratureEngine()
    u = np.atleast_2d(np.asarray(u, dtype=float))
    level = np.clip(np.atleast_1d(np.asarray(level, dtype=float)), PROB_CLAMP, 1 - PROB_CLAMP)
    k = surface.p - 1
    nodes, weights = tangent_rule(engine, k, prune=True)
    m = len(weights)
    ya = (u[:, None, :] + nodes[None, :, :]).reshape(-1, k)
    target = np.repeat(np.broadcast_to(level, (len(u),)), m)

    def f(t):
        return alpha1(surface, np.column_stack([ya, t]), 1.0, engine)[0]

    t0 = surface.height(ya) - ndtri(target)
    t = solve_monotone(f, target, t0, increasing=False, step=0.5)
    center = np.repeat(surface.height(u), m)
    return ndtr(center - t).reshape(len(u), m) @ weights


def _double_mc(surface, y, u, engine: MonteCarloEngine):
    p = surface.p
    n_obs = engine.level(0)
    # Bootstrap probability of the observation itself, on its own stream.
    level, _ = mc_mean(
        n_obs,
        lambda gen, n: (lambda pts: (pts[:, -1] <= surface.height(pts[:, :-1])).astype(float))(
            y + gen.standard_normal((n, p))
        ),
        engine.rs.child(engine.rs.stream ^ 0x5EED),
        engine.threads,
    )
    center = surface.point(u)
    inner = engine.level(1)

    def sampler(gen, n):
        pts = center + gen.standard_normal((n, p))
        z = gen.standard_normal((n, inner, p))
        a = kernels.graph_inner_means(
            np.ascontiguousarray(pts[:, :-1]), np.ascontiguousarray(pts[:, -1]), 1.0, z, surface.d, surface.e
        )
        return (a <= level).astype(float)

    chunk = max(1, min(4096, (1 << 21) // inner))
    return mc_mean(engine.level(0), sampler, engine.rs, engine.threads, chunk)


def double_bootstrap_z(y, surface: BoundarySurface, engine=None):
    """Double bootstrap z-value ``-Phi^{-1}(Pr{bp1(Y, 1) <= bp1(y, 1)})``.

    ``Y`` is drawn from the Gaussian model at the projection of ``y`` onto
    the boundary. For a flat boundary the result equals the signed distance.
    """
    engine = resolve_engine(engine)
    y = _check_y(surface, y)
    u, _ = project_points(surface, y[None, :])
    if isinstance(engine, MonteCarloEngine):
        prob, se = _double_mc(surface, y, u[0], engine)
        return make_estimate(prob, "double", (1.0,), se=se, engine="mc")
    level = alpha1(surface, y, 1.0, engine)[0]
    prob = float(double_bootstrap_prob(surface, u, level, engine)[0])
    return make_estimate(prob, "double", (1.0,))
