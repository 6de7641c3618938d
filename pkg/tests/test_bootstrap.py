import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtr

from mboot.bootstrap import (
    DEFAULT_SCALES,
    MonteCarloEngine,
    QuadratureEngine,
    ScaleSchedule,
    bp1,
    bp2,
    bp3,
    double_bootstrap_z,
    multistep,
    pivot,
    pivot_z,
    resolve_engine,
    scale_from_resample_size,
)
from mboot.bootstrap.order import (
    SurfaceFamily,
    accuracy_order_study,
    fit_slope,
    pivot_cdf,
    rejection_rate,
)
from mboot.engines import RandomSource
from mboot.errors import InvalidArgumentError
from mboot.geometry import BoundarySurface, TubePoint, embed
from mboot.tensors import PotentialTensors, symmetrize

FLAT2 = BoundarySurface.flat(2)
CURVED2 = BoundarySurface.from_curvature([[0.3]], [[[0.05]]])
CURVED3 = BoundarySurface(3, [[0.2, 0.05], [0.05, 0.1]], np.zeros((2, 2, 2)))


class TestScales:
    def test_resample_size(self):
        assert scale_from_resample_size(100, 25) == pytest.approx(2.0)

    @pytest.mark.parametrize("n, m", [(0, 5), (10, 0), (10, 2.5)])
    def test_resample_size_rejects(self, n, m):
        with pytest.raises(InvalidArgumentError):
            scale_from_resample_size(n, m)

    def test_schedule_from_sizes(self):
        sched = ScaleSchedule.from_sizes(100, [50, 100, 200])
        assert list(sched) == pytest.approx([math.sqrt(2), 1.0, math.sqrt(0.5)])
        assert len(ScaleSchedule()) == len(DEFAULT_SCALES)

    def test_schedule_rejects_nonpositive(self):
        with pytest.raises(InvalidArgumentError):
            ScaleSchedule((1.0, 0.0))

    def test_resolve_engine(self):
        assert isinstance(resolve_engine(None), QuadratureEngine)
        assert isinstance(resolve_engine("quad"), QuadratureEngine)
        assert isinstance(resolve_engine("mc"), MonteCarloEngine)
        with pytest.raises(InvalidArgumentError):
            resolve_engine("exact")


class TestMultistepQuadrature:
    @given(v=st.floats(-3, 3), tau=st.floats(0.5, 2.0), u=st.floats(-2, 2))
    def test_flat_bp1(self, v, tau, u):
        est = bp1([u, v], tau, FLAT2)
        assert est.prob == pytest.approx(ndtr(-v / tau), abs=1e-13)
        assert est.method == "bp1" and est.engine == "quadrature"

    @settings(max_examples=15, deadline=None)
    @given(t1=st.floats(0.6, 1.5), t2=st.floats(0.6, 1.5), y1=st.floats(-1, 1), y2=st.floats(-1, 2))
    def test_curved_bp2_collapses_to_bp1(self, t1, t2, y1, y2):
        # Nested Gaussian resampling adds variances. The cubic term turns the
        # boundary back far out in the tail, which 120 nodes under-resolve at
        # large tau.
        eng = QuadratureEngine(nodes=300)
        assert bp2([y1, y2], t1, t2, CURVED2, eng).prob == pytest.approx(
            bp1([y1, y2], math.hypot(t1, t2), CURVED2, eng).prob, abs=1e-11)

    def test_curved_bp3_collapses_to_bp1(self):
        y = [0.3, 0.8]
        assert bp3(y, 0.8, 1.0, 1.2, CURVED2).prob == pytest.approx(
            bp1(y, math.sqrt(0.64 + 1 + 1.44), CURVED2).prob, abs=1e-9)

    def test_p3_nested_gauss_hermite(self):
        y = [0.2, -0.1, 0.9]
        # Nested Gauss-Hermite with 12 nodes per axis is accurate to about 1e-6 here.
        assert bp2(y, 1.0, 0.9, CURVED3).prob == pytest.approx(bp1(y, math.hypot(1.0, 0.9), CURVED3).prob, abs=1e-6)

    def test_convex_region_bp_below_flat(self):
        # Curving the boundary down shrinks R, so its probability drops.
        assert bp1([0.0, 0.5], 1.0, CURVED2).prob < bp1([0.0, 0.5], 1.0, FLAT2).prob

    def test_z_is_minus_quantile(self):
        est = bp1([0.0, 1.0], 1.0, FLAT2)
        assert est.z == pytest.approx(1.0)

    def test_clamp_warns(self):
        with pytest.warns(RuntimeWarning, match="clamped"):
            est = bp1([0.0, 9.0], 1.0, FLAT2)
        assert est.clamped and est.z == pytest.approx(7.0345, abs=1e-3)

    @pytest.mark.parametrize("y, taus", [([0.0], (1.0,)), ([0.0, np.nan], (1.0,)), ([0.0, 1.0], (0.0,)),
                                         ([0.0, 1.0], ()), ([0.0, 1.0], (1.0, -2.0))])
    def test_rejects_bad_input(self, y, taus):
        with pytest.raises(InvalidArgumentError):
            multistep(y, taus, FLAT2)


class TestMultistepMonteCarlo:
    def test_bp1_within_four_se(self):
        est = bp1([0.2, 0.4], 1.2, CURVED2, MonteCarloEngine((50_000,), RandomSource(3)))
        ref = bp1([0.2, 0.4], 1.2, CURVED2).prob
        assert est.engine == "mc" and abs(est.prob - ref) <= 4 * est.se

    def test_bp2_within_four_se(self):
        est = bp2([0.2, 0.4], 1.0, 0.8, CURVED2, MonteCarloEngine((20_000, 200), RandomSource(4)))
        ref = bp2([0.2, 0.4], 1.0, 0.8, CURVED2).prob
        assert abs(est.prob - ref) <= 4 * est.se

    def test_seed_reproducible(self):
        eng = MonteCarloEngine((5_000, 50), RandomSource(8, 3))
        assert bp2([0.0, 0.3], 1.0, 1.0, CURVED2, eng) == bp2([0.0, 0.3], 1.0, 1.0, CURVED2, eng)

    def test_level_reuses_last(self):
        eng = MonteCarloEngine((100, 10))
        assert [eng.level(i) for i in range(4)] == [100, 10, 10, 10]

    def test_rejects_tiny_draws(self):
        with pytest.raises(InvalidArgumentError):
            MonteCarloEngine((100, 1))


class TestPivot:
    @given(u=st.floats(-2, 2), v=st.floats(-3, 3))
    def test_flat_pivot_is_distance(self, u, v):
        assert pivot_z([u, v], FLAT2) == pytest.approx(v, abs=1e-12)

    def test_formula_close_to_quadrature(self):
        s = BoundarySurface.from_curvature([[0.05]])
        y = embed(s, None, TubePoint([0.3], 1.2))
        # The closed form is third-order accurate: the gap is O(d^3).
        assert pivot_z(y, s) == pytest.approx(pivot_z(y, s, method="quadrature"), abs=5e-4)

    def test_pivot_estimate(self):
        est = pivot([0.0, 1.0], FLAT2)
        assert est.method == "pivot" and est.engine == "formula"
        assert est.prob == pytest.approx(ndtr(-1.0))

    def test_non_gaussian_formula_and_quadrature_guard(self):
        rng = np.random.default_rng(9)
        ten = PotentialTensors(2, 0.05 * symmetrize(rng.normal(size=(2,) * 3)), np.zeros((2,) * 4))
        z = pivot_z([0.1, 0.8], CURVED2, ten)
        assert math.isfinite(z) and z == pytest.approx(pivot_z([0.1, 0.8], CURVED2), abs=0.2)
        with pytest.raises(InvalidArgumentError):
            pivot_z([0.1, 0.8], CURVED2, ten, method="quadrature")

    def test_unknown_method(self):
        with pytest.raises(InvalidArgumentError):
            pivot_z([0.0, 1.0], FLAT2, method="exact")


class TestDoubleBootstrap:
    @pytest.mark.parametrize("v", [-1.0, 0.3, 1.7])
    def test_flat_equals_distance(self, v):
        assert double_bootstrap_z([0.4, v], FLAT2).z == pytest.approx(v, abs=1e-9)

    def test_curved_close_to_pivot(self):
        s = BoundarySurface.from_curvature([[0.02]])
        y = embed(s, None, TubePoint([0.5], 1.0))
        assert double_bootstrap_z(y, s).z == pytest.approx(pivot_z(y, s), abs=1e-4)

    def test_mc_within_four_se(self):
        y = [0.3, 1.0]
        ref = double_bootstrap_z(y, CURVED2).prob
        est = double_bootstrap_z(y, CURVED2, MonteCarloEngine((20_000, 1_000), RandomSource(3)))
        # The MC level itself is noisy; allow its spread on top of the outer SE.
        assert abs(est.prob - ref) <= 4 * math.hypot(est.se, 0.003)


class TestOrderStudy:
    def test_flat_rejection_rate_is_exact(self):
        for method in ("naive", "pivot", "double"):
            assert rejection_rate(method, FLAT2, 0.05) == pytest.approx(0.05, abs=1e-12)

    def test_flat_study_below_floor(self):
        rep = accuracy_order_study("pivot", SurfaceFamily([[0.0]]), 0.1)
        assert rep.below_floor and math.isnan(rep.slope)

    def test_naive_first_order(self):
        rep = accuracy_order_study("naive", SurfaceFamily([[0.5]], [[[0.5]]]))
        assert 0.7 <= rep.slope <= 1.3

    def test_pivot_cdf_near_normal(self):
        s = SurfaceFamily([[0.5]]).at(0.05)
        x = np.array([-1.0, 0.0, 1.645])
        assert pivot_cdf(s, x) == pytest.approx(ndtr(x), abs=1e-4)

    def test_fit_slope(self):
        eps = np.array([0.2, 0.1, 0.05])
        assert fit_slope(eps, 3 * eps**2) == pytest.approx(2.0)
        assert math.isnan(fit_slope(eps, [1e-12, 1e-13, 1e-14]))

    @pytest.mark.parametrize("grid", [(0.2, 0.1), (0.2, 0.1, 0.04), (0.2, 0.0, -0.2), (0.1, 0.1, 0.1)])
    def test_rejects_bad_grid(self, grid):
        with pytest.raises(InvalidArgumentError):
            accuracy_order_study("naive", SurfaceFamily([[0.5]]), 0.05, grid)

    def test_rejects_method_and_alpha(self):
        with pytest.raises(InvalidArgumentError):
            rejection_rate("bogus", FLAT2)
        with pytest.raises(InvalidArgumentError):
            rejection_rate("naive", FLAT2, alpha=1.0)


def _skewed_tensors():
    f3 = np.zeros((2, 2, 2))
    f3[1, 1, 1], f3[0, 0, 1] = 0.1, 0.05
    f4 = np.zeros((2, 2, 2, 2))
    f4[1, 1, 1, 1] = 0.02
    return PotentialTensors(2, symmetrize(f3), symmetrize(f4))


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0])
def test_density_bp1_gaussian_matches_alpha1(tau):
    from mboot.bootstrap.probability import density_bp1

    s = BoundarySurface(2, np.array([[0.1]]), np.array([[[0.05]]]))
    ref = bp1([0.3, 1.0], tau, s, QuadratureEngine(nodes=300)).prob
    assert density_bp1(s, PotentialTensors.zeros(2), [0.3, 1.0], tau) == pytest.approx(ref, abs=1e-11)


def test_density_bp1_against_dblquad():
    from scipy import integrate

    from mboot.asymptotics import truncated_log_density

    s = BoundarySurface(2, np.array([[0.1]]), np.array([[[0.05]]]))
    t = _skewed_tensors()
    y = np.array([0.3, 1.0])

    def f(xp, xa):
        return math.exp(truncated_log_density(np.array([xa, xp]), y, t))

    lo, hi = y - 8, y + 8
    inside, _ = integrate.dblquad(f, lo[0], hi[0], lambda a: lo[1], lambda a: float(s.height(np.array([a]))),
                                  epsabs=1e-13, epsrel=1e-12)
    total, _ = integrate.dblquad(f, lo[0], hi[0], lo[1], hi[1], epsabs=1e-13, epsrel=1e-12)
    est = bp1(y, 1.0, s, tensors=t)
    assert est.prob == pytest.approx(inside / total, abs=1e-9)
    assert est.prob != pytest.approx(bp1(y, 1.0, s).prob, abs=1e-3)


def test_density_bp1_scale_invariance():
    s = BoundarySurface(2, np.array([[0.1]]), np.array([[[0.05]]]))
    t = _skewed_tensors()
    tau = 1.7
    lhs = bp1([0.3, 1.0], tau, s, tensors=t).prob
    rhs = bp1(np.array([0.3, 1.0]) / tau, 1.0, s.scaled(tau, tau**2), tensors=t.scaled(tau, tau**2)).prob
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_non_gaussian_resampling_restrictions():
    s2 = BoundarySurface(2, np.array([[0.1]]), np.zeros((1, 1, 1)))
    t = _skewed_tensors()
    with pytest.raises(InvalidArgumentError):
        multistep([0.0, 1.0], (1.0, 1.0), s2, tensors=t)
    with pytest.raises(InvalidArgumentError):
        bp1([0.0, 1.0], 1.0, s2, MonteCarloEngine([100], RandomSource(0, 0)), tensors=t)
