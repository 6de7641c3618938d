"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one verdict line; the lines are repeated in the terminal
summary under "acceptance criteria".
"""
import math
import time

import numpy as np
import pytest
from scipy.special import ndtr

from mboot import verify
from mboot.bootstrap import MonteCarloEngine, QuadratureEngine, bp2, bp3, double_bootstrap_z, pivot_z
from mboot.bootstrap.order import SurfaceFamily, accuracy_order_study
from mboot.cli import main
from mboot.engines import RandomSource
from mboot.geometry import BoundarySurface, TubePoint, embed


def _shrink_ok(rows):
    return all(r.passed for r in rows if r.rule == "shrink")


def _ratios(rows):
    return ", ".join(f"{r.reference / r.value:.1f}" if r.value else "inf" for r in rows if r.rule == "shrink")


def test_c1_closed_form_integrals(report):
    t0 = time.perf_counter()
    rows = verify.run_suites(["g_moments", "phi_c", "moments"])
    dt = time.perf_counter() - t0
    worst = max(abs(r.value - r.reference) for r in rows)
    ok = all(r.passed for r in rows) and dt < 1.0
    report("C1 g0..g5, Phi(c), even moments vs 200-node GH", ok, f"{len(rows)} checks, max |diff| {worst:.1e}, {dt:.2f}s")
    assert [gm.value for gm in rows if gm.name.startswith("moment")] == pytest.approx([1, 3, 15, 105, 945], abs=1e-9)
    assert ok


def _marginalization_residuals(eps):
    fx = verify._Formulas(())
    return np.array([verify._marginalization_residual(c, eps, fx) for c in verify._marginalization_sets()])


def test_c2_marginalization_shrink(report):
    t0 = time.perf_counter()
    big, small = _marginalization_residuals(0.03).max(), _marginalization_residuals(0.015).max()
    dt = time.perf_counter() - t0
    ok = big / small >= 6 and dt < 30
    report("C2 marginalization residual shrink per eps halving", ok, f"ratio {big / small:.1f}, {dt:.2f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="worst of 50 random dim<=3 sets exceeds 50 eps^3 at eps=0.03; see ledger")
def test_c2_marginalization_absolute(report):
    eps = 0.03
    res = _marginalization_residuals(eps)
    within = int(np.sum(res <= 50 * eps**3))
    report("C2 marginalization |formula - oracle| <= 50 eps^3", "NOT MET",
           f"{within}/50 sets within, worst {res.max() / eps**3:.0f} eps^3, median {np.median(res) / eps**3:.0f} eps^3")
    assert within == len(res)


def test_c3_jacobian(report):
    t0 = time.perf_counter()
    rows = verify.run_suites(["jacobian"])
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in rows) and dt < 30
    report("C3 Jacobian formula vs finite differences, p=2,3", ok, f"shrink ratios {_ratios(rows)}, {dt:.2f}s")
    assert ok


def test_c4_cumulants(report):
    t0 = time.perf_counter()
    rows = verify.run_suites(["cumulants"])
    dt = time.perf_counter() - t0
    flat = [r for r in rows if r.rule == "abs"]
    ok = all(r.passed for r in rows) and dt < 120
    report("C4 cumulants of w vs truncated-density quadrature", ok,
           f"flat max {max(r.value for r in flat):.1e}, shrink ratios {_ratios(rows)}, {dt:.2f}s")
    assert ok


def test_c5_inverse_pivot(report):
    t0 = time.perf_counter()
    rows = verify.run_suites(["inverse_pivot"])
    dt = time.perf_counter() - t0
    ok = _shrink_ok(rows) and dt < 5
    report("C5 |z_inf(v_inf(z)) - z| shrink", ok, f"ratios {_ratios(rows)}, {dt:.2f}s")
    assert ok


def test_c6_flat_closed_forms(report):
    t0 = time.perf_counter()
    s = BoundarySurface.flat(2)
    errs = []
    for lam in (-1.0, 0.0, 0.7, 2.0):
        y = [0.4, -lam]  # signed distance lam inside R
        for t1, t2, t3 in ((1.0, 1.0, 1.0), (0.7, 1.4, 1.2)):
            errs.append(abs(bp2(y, t1, t2, s).prob - ndtr(lam / math.hypot(t1, t2))))
            errs.append(abs(bp3(y, t1, t2, t3, s).prob - ndtr(lam / math.sqrt(t1**2 + t2**2 + t3**2))))
    y = [0.4, -0.7]
    mc2 = bp2(y, 1.0, 1.2, s, MonteCarloEngine((40000, 200), RandomSource(11)))
    mc3 = bp3(y, 0.8, 1.0, 1.2, s, MonteCarloEngine((20000, 50, 20), RandomSource(12)))
    z2 = abs(mc2.prob - ndtr(0.7 / math.hypot(1.0, 1.2))) / mc2.se
    z3 = abs(mc3.prob - ndtr(0.7 / math.sqrt(0.64 + 1 + 1.44))) / mc3.se
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-9 and z2 <= 4 and z3 <= 4 and dt < 60
    report("C6 flat bp2/bp3 closed forms (p=2)", ok,
           f"quadrature max err {max(errs):.1e}, MC |err|/SE {z2:.2f} and {z3:.2f}, {dt:.2f}s")
    assert ok


def test_c7_double_bootstrap_matches_pivot(report):
    t0 = time.perf_counter()
    points = [(0.0, 0.5), (0.5, 1.0), (-0.5, 1.5), (1.0, -0.5), (0.0, 2.0)]
    eps_grid = (0.2, 0.1, 0.05, 0.025)
    worst = []
    for eps in eps_grid:
        s = BoundarySurface.from_curvature([[0.1 * eps]])
        diffs = []
        for u, v in points:
            y = embed(s, None, TubePoint([u], v))
            diffs.append(abs(double_bootstrap_z(y, s, QuadratureEngine()).z - pivot_z(y, s)))
        worst.append(max(diffs))
    dt = time.perf_counter() - t0
    ratios = [a / b for a, b in zip(worst, worst[1:])]
    ok = min(ratios) >= 6 and dt < 180
    report("C7 |z_d - z_pivot| shrink, d=0.1 eps", ok,
           f"ratios {', '.join(f'{r:.2f}' for r in ratios)}, {dt:.1f}s")
    assert ok


def test_c8_order_study(report):
    t0 = time.perf_counter()
    family = SurfaceFamily([[0.5]], [[[0.5]]])
    naive = accuracy_order_study("naive", family, 0.05, (0.2, 0.1, 0.05))
    piv = accuracy_order_study("pivot", family, 0.05, (0.2, 0.1, 0.05))
    dt = time.perf_counter() - t0
    ok = 0.7 <= naive.slope <= 1.3 and (piv.below_floor or piv.slope >= 2.5) and dt < 300
    report("C8 rejection-rate error slopes", ok, f"naive {naive.slope:.2f}, pivot {piv.slope:.2f}, {dt:.1f}s")
    assert ok


def test_c9_determinism_across_threads(report, tmp_path):
    cfg = tmp_path / "mc.toml"
    cfg.write_text(
        'p = 2\nsurface.d = [[0.2]]\nmethods = ["bp1", "bp2", "double"]\n'
        "centers.lambda = [0.5, 1.5]\nmc.draws = [20000, 100]\n"
    )
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"sim{threads}.csv"
        assert main(["simulate", "--config", str(cfg), "--engine", "mc", "--seed", "99",
                     "--threads", threads, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1]
    report("C9 simulate byte-identical across --threads", ok, f"{len(outs[0])} bytes")
    assert ok
