"""Formula-versus-oracle suites.

Each suite evaluates closed forms from :mod:`mboot.asymptotics` and
:mod:`mboot.geometry` against an independent numeric computation and returns
:class:`CheckRow` records. Two kinds of rows exist:

``abs``
    passes when ``|value - reference| <= tolerance``.
``shrink``
    ``value`` and ``reference`` are residuals at eps and 2 eps; passes when
    ``reference / value >= tolerance``, i.e. the residual shrinks at least
    that much when eps halves.

``inject`` names formulas whose value is negated before comparison. It is a
fault-injection hook for testing that the suites catch errors.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import ndtr, ndtri

from .asymptotics import (
    CoefficientsC,
    CumulantSet,
    GeometricScalars,
    cornish_fisher_z,
    cumulants_of_w,
    g_moment,
    gaussian_even_moment,
    gaussian_poly_log_expectation,
    mgf_log_from_B,
    phi_c,
    truncated_log_density,
    v_infinity,
    z_infinity,
)
from .engines import gauss_hermite, log_mean_exp_series, norm_pdf, product_rule
from .errors import InvalidArgumentError
from .geometry import BoundarySurface, TubePoint, frame_at, log_jacobian_asymptotic, log_jacobian_numeric
from .tensors import PotentialTensors, symmetrize

__all__ = ["CheckRow", "SUITES", "run_suites", "cumulant_oracle", "INJECTABLE"]

SHRINK = 6.0


@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float
    reference: float
    tolerance: float
    rule: str
    passed: bool


def _abs_row(name, value, reference, tol):
    value, reference = float(value), float(reference)
    ok = bool(np.isfinite(value) and abs(value - reference) <= tol)
    return CheckRow(name, value, reference, tol, "abs", ok)


def _shrink_rows(name, eps, residuals, factor=SHRINK):
    rows = []
    for i in range(1, len(eps)):
        small, large = float(residuals[i]), float(residuals[i - 1])
        ok = bool(np.isfinite(small) and (small == 0.0 or large / small >= factor))
        rows.append(CheckRow(f"{name}[eps {eps[i - 1]:g}->{eps[i]:g}]", small, large, factor, "shrink", ok))
    return rows


class _Formulas:
    """Formula evaluation with optional sign corruption for fault injection."""

    def __init__(self, inject):
        self.inject = frozenset(inject or ())
        unknown = self.inject - INJECTABLE
        if unknown:
            raise InvalidArgumentError(f"unknown injection targets: {sorted(unknown)}")

    def __call__(self, key, value):
        return -value if key in self.inject else value


# --- Gaussian integral identities -------------------------------------------

_A_GRID = (0.3, 1.0, 2.5)
_B_GRID = (-1.2, 0.0, 0.8)


def suite_g_moments(fx):
    rule = gauss_hermite(200)
    rows = []
    for r in range(6):
        for a in _A_GRID:
            for b in _B_GRID:
                c = b / math.sqrt(1 + a * a)
                oracle = rule.expect(rule.nodes**r * norm_pdf(a * rule.nodes + b)) / norm_pdf(c)
                rows.append(_abs_row(f"g{r}(a={a:g},b={b:g})", fx(f"g{r}", g_moment(r, a, b)), oracle, 1e-9))
    return rows


def suite_phi_c(fx):
    rule = gauss_hermite(200)
    rows = []
    for a in _A_GRID:
        for b in _B_GRID:
            oracle = rule.expect(ndtr(a * rule.nodes + b))
            rows.append(_abs_row(f"phi_c(a={a:g},b={b:g})", fx("phi_c", phi_c(a, b)), oracle, 1e-10))
    return rows


def suite_moments(fx):
    rule = gauss_hermite(200)
    return [
        _abs_row(f"moment(2r={2 * r})", fx("moment", gaussian_even_moment(r)), rule.expect(rule.nodes ** (2 * r)), 1e-9)
        for r in range(1, 6)
    ]


# --- Polynomial-exponential expansions ---------------------------------------

def _random_sym(rng, shape):
    return symmetrize(rng.uniform(-1, 1, size=shape)) if shape else float(rng.uniform(-1, 1))


def _marginalization_sets(n=50, seed=20240):
    rng = np.random.default_rng(seed)
    sets = []
    for i in range(n):
        dim = 1 + i % 3
        sets.append(tuple(_random_sym(rng, (dim,) * k) for k in range(5)))
    return sets


def _marginalization_residual(coefs, eps, fx):
    A, a1, a2, a3, a4 = coefs
    dim = a1.size
    scaled = (A * eps, a1 * eps, a2 * eps, a3 * eps, a4 * eps**2 / 0.3)
    nodes, weights = product_rule(gauss_hermite(30), dim)
    q = (
        nodes @ scaled[1]
        + np.einsum("na,ab,nb->n", nodes, scaled[2], nodes)
        + np.einsum("na,nb,nc,abc->n", nodes, nodes, nodes, scaled[3])
        + np.einsum("na,nb,nc,nd,abcd->n", nodes, nodes, nodes, nodes, scaled[4])
    )
    oracle = scaled[0] + log_mean_exp_series(q, weights, order=12)
    return abs(fx("marginalization", gaussian_poly_log_expectation(*scaled)) - oracle)


# Bounds on |residual| / eps^3. The remainder constant grows with the
# dimension through index sums; the worst of the random sets sits near 60 as
# eps -> 0 and near 380 at eps = 0.03, where fourth-order terms still matter.
MARGINALIZATION_CUBIC = 500.0
MGF_CUBIC = 200.0


def suite_marginalization(fx, eps=0.03):
    sets = _marginalization_sets()
    res = [max(_marginalization_residual(c, e, fx) for c in sets) for e in (eps, eps / 2)]
    rows = [_abs_row(f"marginalization(max of {len(sets)}, eps={eps:g})", res[0], 0.0,
                     MARGINALIZATION_CUBIC * eps**3)]
    return rows + _shrink_rows("marginalization", (eps, eps / 2), res)


def _mgf_residual(B, lam, t, fx):
    rule = gauss_hermite(40)
    w = lam + t + rule.nodes
    q = B[1] * w + B[2] * w**2 + B[3] * w**3 + B[4] * w**4
    oracle = B[0] + log_mean_exp_series(q, rule.weights, order=12)
    return abs(fx("mgf_b", mgf_log_from_B(B, lam, t)) - oracle)


def suite_mgf_b(fx, eps=0.03):
    rng = np.random.default_rng(7)
    cases = [(rng.uniform(-1, 1, 5), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)) for _ in range(20)]
    powers = np.array([1, 1, 1, 1, 2])
    res = []
    for e in (eps, eps / 2):
        res.append(max(_mgf_residual(b * e**powers, lam, t, fx) for b, lam, t in cases))
    rows = [_abs_row(f"mgf_b(max of {len(cases)}, eps={eps:g})", res[0], 0.0, MGF_CUBIC * eps**3)]
    return rows + _shrink_rows("mgf_b", (eps, eps / 2), res)


# --- Geometry ----------------------------------------------------------------

def suite_jacobian(fx, eps_grid=(0.2, 0.1, 0.05)):
    rng = np.random.default_rng(1)
    rows = []
    s = BoundarySurface.from_curvature([[0.1]])
    rows.append(_abs_row("jacobian(p=2,d=0.1,u=0,v=0.5)",
                         fx("jacobian", log_jacobian_asymptotic(s, None, TubePoint([0.0], 0.5))), 0.095, 1e-12))
    for p in (2, 3):
        k = p - 1
        D = symmetrize(rng.normal(size=(k, k)))
        E = symmetrize(rng.normal(size=(k,) * 3))
        F3 = symmetrize(rng.normal(size=(p,) * 3))
        F4 = symmetrize(rng.normal(size=(p,) * 4))
        res = []
        for eps in eps_grid:
            surf = BoundarySurface(p, eps * D, eps**2 * E)
            ten = PotentialTensors(p, eps * F3, eps**2 * F4)
            worst = 0.0
            for uu in np.linspace(-1, 1, 5):
                for vv in np.linspace(-1, 1, 5):
                    u = np.full(k, uu)
                    if k > 1:
                        u[0] *= -0.5
                    tp = TubePoint(u, vv)
                    f = fx("jacobian", log_jacobian_asymptotic(surf, ten, tp))
                    worst = max(worst, abs(f - log_jacobian_numeric(surf, ten, tp)))
            res.append(worst)
        rows += _shrink_rows(f"jacobian(p={p})", eps_grid, res)
    return rows


# --- Cumulants of the signed distance -----------------------------------------

def _cumulant_base(seed=5):
    rng = np.random.default_rng(seed)
    p = 2
    F3 = 0.5 * symmetrize(rng.normal(size=(p,) * 3))
    A = rng.normal(size=(3, p))
    F4 = 0.05 * sum(np.einsum("i,j,k,l->ijkl", a, a, a, a) for a in A)
    return np.array([[0.8]]), np.array([[[0.5]]]), F3, F4


def cumulant_oracle(surface, tensors, lam, half_width=7.0, n=201):
    """Cumulants of v under eta(0, lam) by a trapezoid grid in tube coordinates (p = 2).

    The density of (u, v) is the truncated density at eta(u, v) times the
    finite-difference Jacobian of the embedding.
    """
    us = np.linspace(-half_width, half_width, n)
    vs = np.linspace(lam - half_width, lam + half_width, n)
    du, dv = us[1] - us[0], vs[1] - vs[0]
    eta0 = np.array([0.0, lam])
    dens = np.empty((n, n))
    h = 1e-5
    for i, u in enumerate(us):
        normal = frame_at(surface, tensors, [u]).normal
        dn = (frame_at(surface, tensors, [u + h]).normal - frame_at(surface, tensors, [u - h]).normal) / (2 * h)
        dpt = np.array([1.0, float(surface.gradient(np.array([u]))[0])])
        pts = surface.point(np.array([u]))[None, :] + vs[:, None] * normal[None, :]
        col_u = dpt[None, :] + vs[:, None] * dn[None, :]
        jac = np.abs(col_u[:, 0] * normal[1] - col_u[:, 1] * normal[0])
        dens[i] = np.exp(truncated_log_density(pts, eta0, tensors)) * jac
    fv = dens.sum(axis=0) * du
    mass = fv.sum() * dv
    mu = (fv * vs).sum() * dv / mass
    c2, c3, c4 = ((fv * (vs - mu) ** k).sum() * dv / mass for k in (2, 3, 4))
    return np.array([mu, c2, c3, c4 - 3 * c2**2])


def suite_cumulants(fx, eps_grid=(0.1, 0.05, 0.025), lams=(0.0, 0.8)):
    D, E, F3, F4 = _cumulant_base()
    rows = []
    for lam in lams:
        flat = cumulant_oracle(BoundarySurface.flat(2), PotentialTensors.zeros(2), lam, half_width=10.0, n=301)
        k = cumulants_of_w(GeometricScalars(), CoefficientsC(), lam)
        formula = np.array([fx("cumulants", k.k1), k.k2, k.k3, k.k4])
        rows.append(_abs_row(f"cumulants(flat,lam={lam:g})", np.max(np.abs(formula - flat)), 0.0, 1e-10))
        res = []
        for eps in eps_grid:
            surf = BoundarySurface(2, eps * D, eps**2 * E)
            ten = PotentialTensors(2, eps * F3, eps**2 * F4)
            k = cumulants_of_w(GeometricScalars.from_geometry(surf, ten), CoefficientsC(), lam)
            formula = np.array([fx("cumulants", k.k1), k.k2, k.k3, k.k4])
            res.append(np.max(np.abs(formula - cumulant_oracle(surf, ten, lam))))
        rows += _shrink_rows(f"cumulants(lam={lam:g})", eps_grid, res)
    return rows


# --- Pivot inversion and Cornish-Fisher ------------------------------------------

_INV_BASE = dict(daa=0.7, dab2=0.4, dabp=-0.3, p999=0.9, p9999=0.5, p99a2=0.6, p9ab2=0.35, p99aa=-0.4)


def suite_inverse_pivot(fx, eps_grid=(0.2, 0.1, 0.05)):
    res = []
    for eps in eps_grid:
        gs = GeometricScalars(**{k: v * eps ** (1 if k in ("daa", "p999") else 2) for k, v in _INV_BASE.items()})
        worst = 0.0
        for z in (-1.0, 0.0, 1.5):
            for lam in (0.0, 0.8):
                for tau in (0.7, 1.0, 1.4):
                    zz = fx("inverse_pivot", z_infinity(v_infinity(z, gs, lam, tau), gs, lam, tau))
                    worst = max(worst, abs(zz - z))
        res.append(worst)
    return _shrink_rows("inverse_pivot", eps_grid, res)


def _edgeworth_cdf(k: CumulantSet, w, lo=-14.0, n=40001):
    """Trapezoid integral of the third-order Edgeworth density up to ``w``."""
    s = math.sqrt(k.k2)
    g1, g2 = k.k3 / s**3, k.k4 / s**4
    x = np.linspace(lo, (w - k.k1) / s, n)
    he3 = x**3 - 3 * x
    he4 = x**4 - 6 * x * x + 3
    he6 = x**6 - 15 * x**4 + 45 * x * x - 15
    dens = norm_pdf(x) * (1 + g1 / 6 * he3 + g2 / 24 * he4 + g1 * g1 / 72 * he6)
    return float(trapezoid(dens, x))


def suite_cornish_fisher(fx):
    rows = []
    k = CumulantSet(0.2, 1.21)
    for w in (-1.5, 0.2, 2.0):
        rows.append(_abs_row(f"cornish_fisher(affine,w={w:g})",
                             fx("cornish_fisher", cornish_fisher_z(k, w)), (w - 0.2) / 1.1, 1e-14))
    for k3, k4 in ((0.1, 0.0), (0.0, 0.1), (0.1, 0.05)):
        k = CumulantSet(0.0, 1.0, k3, k4)
        for w in (-1.0, 1.0):
            oracle = float(ndtri(_edgeworth_cdf(k, w)))
            rows.append(_abs_row(f"cornish_fisher(k3={k3:g},k4={k4:g},w={w:g})",
                                 fx("cornish_fisher", cornish_fisher_z(k, w)), oracle, 1e-3))
    return rows


SUITES = {
    "g_moments": suite_g_moments,
    "phi_c": suite_phi_c,
    "moments": suite_moments,
    "marginalization": suite_marginalization,
    "mgf_b": suite_mgf_b,
    "jacobian": suite_jacobian,
    "cumulants": suite_cumulants,
    "inverse_pivot": suite_inverse_pivot,
    "cornish_fisher": suite_cornish_fisher,
}

INJECTABLE = frozenset(
    [f"g{r}" for r in range(6)]
    + ["phi_c", "moment", "marginalization", "mgf_b", "jacobian", "cumulants", "inverse_pivot", "cornish_fisher"]
)


def run_suites(names=None, inject=(), timings=None):
    """Run the named suites (all by default) and return their rows in order."""
    names = list(SUITES) if names is None else list(names)
    if not names:
        raise InvalidArgumentError("no checks selected")
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidArgumentError(f"unknown checks: {unknown}")
    fx = _Formulas(inject)
    rows = []
    for name in names:
        t0 = time.perf_counter()
        rows += SUITES[name](fx)
        if timings is not None:
            timings[name] = time.perf_counter() - t0
    return rows
