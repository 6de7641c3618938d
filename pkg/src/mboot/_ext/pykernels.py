"""Pure numpy kernels; reference behaviour for the compiled module."""
import numpy as np
from scipy.special import ndtr

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_BLOCK = 1 << 20


def _height(u, d, e):
    return -np.einsum("...a,ab,...b->...", u, d, u) - np.einsum(
        "...a,...b,...c,abc->...", u, u, u, e
    )


def graph_prob(ya, yp, tau, tnodes, tweights, d, e):
    """Gaussian probability of the region below the graph, and its y_p density.

    Row i integrates Phi((h(ya_i + tau x) - yp_i) / tau) against the tangent
    rule (tnodes, tweights).
    """
    ya = np.asarray(ya, dtype=float)
    yp = np.asarray(yp, dtype=float)
    n, m = len(ya), len(tnodes)
    prob = np.empty(n)
    dens = np.empty(n)
    step = max(1, _BLOCK // max(m, 1))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        u = ya[lo:hi, None, :] + tau * tnodes[None, :, :]
        x = (_height(u, d, e) - yp[lo:hi, None]) / tau
        prob[lo:hi] = ndtr(x) @ tweights
        dens[lo:hi] = (_INV_SQRT_2PI * np.exp(-0.5 * x * x)) @ tweights / tau
    return prob, dens


def graph_inner_means(ya, yp, tau, z, d, e):
    """Fraction of the inner draws y + tau z that fall below the graph."""
    k = ya.shape[1]
    u = ya[:, None, :] + tau * z[:, :, :k]
    inside = yp[:, None] + tau * z[:, :, k] <= _height(u, d, e)
    return inside.mean(axis=1)
