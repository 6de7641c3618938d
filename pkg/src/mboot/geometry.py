"""Region boundaries, tube coordinates and the change-of-variables Jacobian.

The boundary of the region R is the graph

    eta_p = h(u) = -d^{ab} u_a u_b - e^{abc} u_a u_b u_c,   eta_a = u_a,

taken as exact. R lies below the graph and the unit normal points up, away
from R, so the signed distance ``v`` is positive outside R. Normals are
orthogonal to the tangents in the metric of :class:`PotentialTensors`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateInputError,
    InvalidArgumentError,
    NumericDomainError,
)
from .tensors import PotentialTensors, check_symmetric

__all__ = [
    "BoundarySurface",
    "TubePoint",
    "Frame",
    "surface_height",
    "frame_at",
    "embed",
    "project",
    "log_jacobian_asymptotic",
    "log_jacobian_numeric",
    "project_points",
    "parallel_surface_height",
]

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 100
GRID_HALF_WIDTH = 3.0
GRID_POINTS = 41


@dataclass(frozen=True, eq=False)
class BoundarySurface:
    """Smooth boundary with curvature matrix ``d`` and cubic shape tensor ``e``."""

    p: int
    d: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        p = int(self.p)
        if p < 2:
            raise InvalidArgumentError("p must be at least 2")
        object.__setattr__(self, "p", p)
        d = check_symmetric(np.atleast_2d(np.asarray(self.d, dtype=float)), "d", 2, p - 1)
        e = np.asarray(self.e, dtype=float).reshape((p - 1,) * 3)
        e = check_symmetric(e, "e", 3, p - 1, atol=1e-15)
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)

    @classmethod
    def flat(cls, p):
        return cls(p, np.zeros((p - 1, p - 1)), np.zeros((p - 1,) * 3))

    @classmethod
    def from_curvature(cls, d, e=None):
        d = np.atleast_2d(np.asarray(d, dtype=float))
        k = d.shape[0]
        if e is None:
            e = np.zeros((k, k, k))
        return cls(k + 1, d, e)

    @property
    def is_flat(self):
        return not (np.any(self.d) or np.any(self.e))

    def scaled(self, sd, se):
        """Surface with ``d`` multiplied by ``sd`` and ``e`` by ``se``."""
        return BoundarySurface(self.p, self.d * sd, self.e * se)

    # Vectorized pieces; ``u`` has shape (..., p - 1).
    def height(self, u):
        u = np.asarray(u, dtype=float)
        return -np.einsum("...a,ab,...b->...", u, self.d, u) - np.einsum(
            "...a,...b,...c,abc->...", u, u, u, self.e
        )

    def gradient(self, u):
        u = np.asarray(u, dtype=float)
        return -2.0 * np.einsum("ab,...b->...a", self.d, u) - 3.0 * np.einsum(
            "abc,...b,...c->...a", self.e, u, u
        )

    def hessian(self, u):
        u = np.asarray(u, dtype=float)
        return -2.0 * self.d - 6.0 * np.einsum("abc,...c->...ab", self.e, u)

    def point(self, u):
        """The boundary point eta(u)."""
        u = np.asarray(u, dtype=float)
        return np.concatenate([u, self.height(u)[..., None]], axis=-1)


@dataclass(frozen=True)
class TubePoint:
    """Foot point ``u`` on the boundary and signed distance ``v`` along the normal."""

    u: np.ndarray
    v: float

    def __post_init__(self):
        object.__setattr__(self, "u", np.atleast_1d(np.asarray(self.u, dtype=float)))
        object.__setattr__(self, "v", float(self.v))


@dataclass(frozen=True)
class Frame:
    tangents: np.ndarray  # (p - 1, p), row a is d eta / d u_a
    normal: np.ndarray
    metric: np.ndarray


def _check_u(surface, u):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (surface.p - 1,):
        raise InvalidArgumentError(
            f"u must have length {surface.p - 1}, got shape {u.shape}"
        )
    return u


def _tensors(surface, tensors):
    if tensors is None:
        return PotentialTensors.zeros(surface.p)
    if tensors.p != surface.p:
        raise InvalidArgumentError("surface and tensors disagree on p")
    return tensors


def surface_height(surface, u):
    """Height of the boundary above the tangent coordinates ``u``."""
    return float(surface.height(_check_u(surface, u)))


def frame_at(surface, tensors, u):
    """Tangents and metric-unit normal of the boundary at ``u``.

    Raises
    ------
    NumericDomainError
        If the metric at eta(u) is not positive definite.
    """
    u = _check_u(surface, u)
    tensors = _tensors(surface, tensors)
    p = surface.p
    grad = surface.gradient(u)
    tangents = np.hstack([np.eye(p - 1), grad[:, None]])
    metric = tensors.metric(surface.point(u))
    try:
        np.linalg.cholesky(metric)
    except np.linalg.LinAlgError:
        raise NumericDomainError(f"metric is not positive definite at u={u}") from None
    # M n is Euclidean-orthogonal to the tangents, so M n is parallel to nu.
    nu = np.append(-grad, 1.0)
    n = np.linalg.solve(metric, nu)
    n /= np.sqrt(nu @ n)
    return Frame(tangents, n, metric)


def embed(surface, tensors, tp):
    """Point eta(u) + v * normal(u)."""
    frame = frame_at(surface, tensors, tp.u)
    return surface.point(tp.u) + tp.v * frame.normal


def _stationarity(surface, tensors, y, u):
    frame = frame_at(surface, tensors, u)
    r = y - surface.point(u)
    return frame.tangents @ (frame.metric @ r), frame, r


def _stationarity_jacobian(surface, tensors, y, u, h=1e-7):
    k = u.size
    jac = np.empty((k, k))
    for b in range(k):
        step = np.zeros(k)
        step[b] = h
        gp = _stationarity(surface, tensors, y, u + step)[0]
        gm = _stationarity(surface, tensors, y, u - step)[0]
        jac[:, b] = (gp - gm) / (2 * h)
    return jac


def _newton_foot(surface, tensors, y, u0):
    """Damped Newton on the stationarity conditions; returns (u, converged)."""
    u = np.array(u0, dtype=float)
    g = _stationarity(surface, tensors, y, u)[0]
    for _ in range(NEWTON_MAXITER):
        if np.max(np.abs(g)) <= NEWTON_TOL:
            return u, True
        jac = _stationarity_jacobian(surface, tensors, y, u)
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            return u, False
        norm0 = np.linalg.norm(g)
        t = 1.0
        while t > 1e-8:
            trial = u + t * step
            try:
                gt = _stationarity(surface, tensors, y, trial)[0]
            except NumericDomainError:
                gt = None
            if gt is not None and np.linalg.norm(gt) < norm0 * (1 - 1e-4 * t):
                break
            t *= 0.5
        else:
            return u, np.max(np.abs(g)) <= NEWTON_TOL
        u, g = trial, gt
    return u, np.max(np.abs(g)) <= NEWTON_TOL


def _is_local_min(surface, tensors, y, u):
    # G is minus half the gradient of the squared distance, so -dG/du must be PD.
    jac = _stationarity_jacobian(surface, tensors, y, u)
    sym = -(jac + jac.T) / 2
    return bool(np.all(np.linalg.eigvalsh(sym) > 0))


def _grid_candidates(surface, y):
    k = surface.p - 1
    axis = np.linspace(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, GRID_POINTS)
    grids = np.meshgrid(*([axis] * k), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    dist = np.sum((surface.point(pts) - y) ** 2, axis=-1).reshape((GRID_POINTS,) * k)
    # Discrete local minima over the full neighbourhood.
    padded = np.pad(dist, 1, constant_values=np.inf)
    is_min = np.ones(dist.shape, dtype=bool)
    for offset in np.ndindex(*([3] * k)):
        if all(o == 1 for o in offset):
            continue
        sl = tuple(slice(o, o + GRID_POINTS) for o in offset)
        is_min &= dist <= padded[sl]
    idx = np.argwhere(is_min)
    order = np.argsort(dist[tuple(idx.T)])
    return [axis[i] for i in idx[order]]


def project(surface, tensors, y):
    """Tube coordinates (u, v) of the point ``y``.

    Newton starts at the first p - 1 coordinates of ``y``. If it stalls or
    lands on a stationary point that is not a nearest point, the local minima
    of a dense grid on [-3, 3]^(p-1) are used as starting points.

    Raises
    ------
    ConvergenceError
        No starting point converged.
    DegenerateInputError
        Two distinct foot points are equally near.
    """
    tensors = _tensors(surface, tensors)
    y = np.asarray(y, dtype=float)
    if y.shape != (surface.p,):
        raise InvalidArgumentError(f"y must have length {surface.p}")

    u, ok = _newton_foot(surface, tensors, y, y[:-1])
    if ok and _is_local_min(surface, tensors, y, u):
        solutions = [u]
        last = u
    else:
        solutions = []
        last = u
        for u0 in _grid_candidates(surface, y):
            u, ok = _newton_foot(surface, tensors, y, u0)
            last = u
            if not ok or not _is_local_min(surface, tensors, y, u):
                continue
            if all(np.max(np.abs(u - s)) > 1e-6 for s in solutions):
                solutions.append(u)
        if not solutions:
            raise ConvergenceError("projection did not converge", last=last)

    def offset(s):
        g, frame, r = _stationarity(surface, tensors, y, s)
        return float(frame.normal @ frame.metric @ r)

    vs = [offset(s) for s in solutions]
    best = int(np.argmin(np.abs(vs)))
    for i, v in enumerate(vs):
        if i != best and abs(abs(v) - abs(vs[best])) <= 1e-9 * (1 + abs(v)):
            raise DegenerateInputError(
                f"ambiguous projection of {y}: foot points {solutions[best]} and {solutions[i]}"
            )
    return TubePoint(solutions[best], vs[best])


def log_jacobian_numeric(surface, tensors, tp, h=1e-5):
    """log |det d eta / d(u, v)| by central differences of :func:`embed`."""
    p = surface.p
    cols = np.empty((p, p))
    for a in range(p - 1):
        step = np.zeros(p - 1)
        step[a] = h
        fp = embed(surface, tensors, TubePoint(tp.u + step, tp.v))
        fm = embed(surface, tensors, TubePoint(tp.u - step, tp.v))
        cols[:, a] = (fp - fm) / (2 * h)
    fp = embed(surface, tensors, TubePoint(tp.u, tp.v + h))
    fm = embed(surface, tensors, TubePoint(tp.u, tp.v - h))
    cols[:, p - 1] = (fp - fm) / (2 * h)
    sign, logdet = np.linalg.slogdet(cols)
    if sign == 0 or not np.isfinite(logdet):
        raise NumericDomainError("singular change of variables")
    return float(logdet)


def log_jacobian_asymptotic(surface, tensors, tp):
    """Second-order expansion of the log Jacobian of eta <-> (u, v)."""
    tensors = _tensors(surface, tensors)
    u = _check_u(surface, tp.u)
    v = tp.v
    d, e = surface.d, surface.e
    P = surface.p - 1
    t = slice(0, P)
    f3 = tensors.phi3
    f4 = tensors.phi4
    f3t = f3[t, t, t]          # phi^{abc}
    f3tp = f3[t, t, P]         # phi^{abp}
    f3pp = f3[t, P, P]         # phi^{app}
    f3ppp = f3[P, P, P]
    f4ttpp = f4[t, t, P, P]    # phi^{abpp}
    f4tttp = f4[t, t, t, P]    # phi^{abcp}

    lin_u = -0.5 * f3pp
    lin_v = 2 * np.trace(d) - np.trace(f3tp)
    vv = -(2 * np.sum(d * d) - 2 * np.sum(d * f3tp) + 0.5 * np.sum(f3tp * f3tp))
    uu = (
        0.5 * d * f3ppp
        - 0.25 * f4ttpp
        + 0.25 * np.outer(f3pp, f3pp)
        + 0.5 * np.einsum("ac,ad->cd", f3tp, f3tp)
        + 2 * np.einsum("ac,ad->cd", d, d - f3tp)
    )
    uv = (
        6 * np.einsum("aac->c", e)
        + np.trace(d) * f3pp
        + 4 * d @ f3pp
        - np.einsum("aac->c", f4tttp)
        + np.einsum("aad,cd->c", f3t, f3tp)
        + 0.5 * np.trace(f3tp) * f3pp
        - 2 * np.einsum("cd,aad->c", d, f3t)
        - np.einsum("ad,acd->c", 2 * d - f3tp, f3t)
    )
    return float(lin_u @ u + lin_v * v + vv * v * v + u @ uu @ u + (uv @ u) * v)


# Batch helpers for the Euclidean metric, used by the bootstrap kernels.

def project_points(surface, y, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
    """Vectorized Euclidean projection of the rows of ``y`` onto the boundary.

    Returns ``(u, v)`` with shapes (n, p - 1) and (n,). Newton steps on the
    squared distance are safeguarded by backtracking, and rows where the
    Hessian is not positive definite take a scaled gradient step instead.
    Intended for points inside the tube; failures raise
    :class:`ConvergenceError`.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    ya, yp = y[:, :-1], y[:, -1]
    k = surface.p - 1
    eye = np.eye(k)

    def dist2(u):
        return np.sum((ya - u) ** 2, axis=1) + (yp - surface.height(u)) ** 2

    u = ya.copy()
    f = dist2(u)
    for _ in range(maxiter):
        h = surface.height(u)
        g = surface.gradient(u)
        # resid is minus half the gradient of the squared distance.
        resid = (ya - u) + (yp - h)[:, None] * g
        if np.max(np.abs(resid), initial=0.0) <= tol:
            break
        hess = eye + g[:, :, None] * g[:, None, :] - (yp - h)[:, None, None] * surface.hessian(u)
        pd = np.all(np.linalg.eigvalsh(hess) > 0, axis=1)
        safe = np.where(pd[:, None, None], hess, eye * (1.0 + np.sum(g * g, axis=1))[:, None, None])
        step = np.linalg.solve(safe, resid[..., None])[..., 0]
        t = np.ones(len(u))
        for _ in range(40):
            trial = u + t[:, None] * step
            ft = dist2(trial)
            bad = ft > f + 1e-14 * (1 + f)
            if not bad.any():
                break
            t = np.where(bad, 0.5 * t, t)
        u, f = trial, ft
    else:
        raise ConvergenceError("batch projection did not converge", last=u)
    g = surface.gradient(u)
    nu = np.concatenate([-g, np.ones((len(u), 1))], axis=1)
    nu /= np.linalg.norm(nu, axis=1, keepdims=True)
    v = np.sum((y - surface.point(u)) * nu, axis=1)
    return u, v


def parallel_surface_height(surface, ya, v, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
    """Height of the Euclidean parallel surface at signed distance ``v``.

    For each row of ``ya`` solves ``u + v n_a(u) = ya`` and returns
    ``h(u) + v n_p(u)``: the level ``y_p`` above ``ya`` at which the signed
    distance equals ``v``.
    """
    ya = np.atleast_2d(np.asarray(ya, dtype=float))
    v = np.broadcast_to(np.asarray(v, dtype=float), ya.shape[:1])
    u = ya.copy()
    k = surface.p - 1
    eye = np.eye(k)
    for _ in range(maxiter):
        g = surface.gradient(u)
        s = np.sqrt(1.0 + np.sum(g * g, axis=1))
        n_a = -g / s[:, None]
        resid = u + v[:, None] * n_a - ya
        if np.max(np.abs(resid), initial=0.0) <= tol:
            break
        hess = surface.hessian(u)
        if hess.ndim == 2:
            hess = np.broadcast_to(hess, (len(u), k, k))
        hg = np.einsum("nab,nb->na", hess, g)
        dn = -hess / s[:, None, None] + g[:, :, None] * hg[:, None, :] / (s**3)[:, None, None]
        jac = eye + v[:, None, None] * dn
        u = u - np.linalg.solve(jac, resid[..., None])[..., 0]
    else:
        raise ConvergenceError("parallel surface solve did not converge", last=u)
    g = surface.gradient(u)
    s = np.sqrt(1.0 + np.sum(g * g, axis=1))
    return surface.height(u) + v / s
