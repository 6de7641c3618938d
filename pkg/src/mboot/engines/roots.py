"""Vectorized scalar root finding for monotone functions."""
import numpy as np

from ..errors import ConvergenceError

__all__ = ["solve_monotone"]


def solve_monotone(f, target, t0, increasing, step=1.0, xtol=1e-13, maxiter=200):
    """Solve f(t) = target elementwise for f monotone in t.

    ``f`` maps an array of t to an array of values of the same shape. A
    bracket is grown geometrically from ``t0`` and then refined with the
    Illinois variant of regula falsi.
    """
    target = np.asarray(target, dtype=float)
    t0 = np.broadcast_to(np.asarray(t0, dtype=float), target.shape).astype(float)
    sign = 1.0 if increasing else -1.0

    def g(t):
        return sign * (np.asarray(f(t), dtype=float) - target)

    lo = t0.copy()
    hi = t0.copy()
    g0 = g(t0)
    glo = g0.copy()
    ghi = g0.copy()
    width = np.full(target.shape, float(step))
    need_lo = glo > 0
    need_hi = ghi < 0
    for _ in range(80):
        if not (need_lo.any() or need_hi.any()):
            break
        lo = np.where(need_lo, lo - width, lo)
        hi = np.where(need_hi, hi + width, hi)
        if need_lo.any():
            glo = np.where(need_lo, g(lo), glo)
        if need_hi.any():
            ghi = np.where(need_hi, g(hi), ghi)
        width *= 2.0
        need_lo = glo > 0
        need_hi = ghi < 0
    else:
        raise ConvergenceError("could not bracket root", last=t0)

    exact = (glo == 0) | (ghi == 0)
    side = np.zeros(target.shape, dtype=int)
    for _ in range(maxiter):
        done = (hi - lo <= xtol * (1.0 + np.abs(lo))) | exact
        if done.all():
            break
        denom = ghi - glo
        t = np.where(denom != 0, lo - glo * (hi - lo) / np.where(denom != 0, denom, 1.0), 0.5 * (lo + hi))
        t = np.clip(t, lo, hi)
        t = np.where(done, lo, t)
        gt = g(t)
        exact |= (gt == 0) & ~done
        left = (gt < 0) & ~done
        right = (gt > 0) & ~done
        # Illinois: halve the retained endpoint value after a repeat.
        glo_new = np.where(left, gt, np.where(right & (side == 1), glo * 0.5, glo))
        ghi_new = np.where(right, gt, np.where(left & (side == -1), ghi * 0.5, ghi))
        lo = np.where(left, t, lo)
        hi = np.where(right, t, hi)
        lo = np.where(exact & ~done, t, lo)
        hi = np.where(exact & ~done, t, hi)
        glo, ghi = glo_new, ghi_new
        side = np.where(left, -1, np.where(right, 1, side))
    else:
        raise ConvergenceError("root refinement did not converge", last=0.5 * (lo + hi))
    return np.where(glo == 0, lo, np.where(ghi == 0, hi, 0.5 * (lo + hi)))
