"""Time the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is called on the
same inputs under both backends; the script checks they agree and prints the
best-of-``repeat`` wall time and the speedup.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from mboot._ext.kernels import backend_functions
from mboot.engines import gauss_hermite, product_rule


def _inputs(p, n_points, n_inner, seed=0):
    rng = np.random.default_rng(seed)
    k = p - 1
    d = 0.1 * np.eye(k)
    e = np.zeros((k, k, k))
    ya = rng.standard_normal((n_points, k))
    yp = rng.standard_normal(n_points)
    nodes, weights = product_rule(gauss_hermite(120 if k == 1 else 12), k)
    z = rng.standard_normal((n_points, n_inner, p))
    return ya, yp, nodes, weights, z, d, e


def run(p=2, n_points=4000, n_inner=500, repeat=3):
    ya, yp, nodes, weights, z, d, e = _inputs(p, n_points, n_inner)
    cases = {
        "graph_prob": lambda m: m.graph_prob(ya, yp, 1.0, nodes, weights, d, e),
        "graph_inner_means": lambda m: m.graph_inner_means(ya, yp, 1.0, z, d, e),
    }
    py, cy = backend_functions("python"), backend_functions("cython")
    print(f"p={p} points={n_points} inner={n_inner}")
    print(f"{'kernel':<20}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, call in cases.items():
        ref, got = call(py), call(cy)
        ref = ref[0] if isinstance(ref, tuple) else ref
        got = got[0] if isinstance(got, tuple) else got
        if not np.allclose(ref, got, rtol=0, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        t_py = min(timeit.repeat(lambda: call(py), number=1, repeat=repeat))
        t_cy = min(timeit.repeat(lambda: call(cy), number=1, repeat=repeat))
        print(f"{name:<20}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>10.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--points", type=int, default=4000)
    ap.add_argument("--inner", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    run(a.p, a.points, a.inner, a.repeat)
