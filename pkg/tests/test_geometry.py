import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mboot.errors import DegenerateInputError, InvalidArgumentError, NumericDomainError
from mboot.geometry import (
    BoundarySurface,
    TubePoint,
    embed,
    frame_at,
    log_jacobian_asymptotic,
    log_jacobian_numeric,
    parallel_surface_height,
    project,
    project_points,
    surface_height,
)
from mboot.tensors import PotentialTensors, symmetrize

coord = st.floats(-1.5, 1.5)


class TestBoundarySurface:
    def test_height_formula(self):
        s = BoundarySurface.from_curvature([[0.3]], [[[0.1]]])
        assert surface_height(s, [2.0]) == pytest.approx(-0.3 * 4 - 0.1 * 8)

    def test_gradient_matches_finite_difference(self):
        rng = np.random.default_rng(0)
        s = BoundarySurface(3, symmetrize(rng.normal(size=(2, 2))), symmetrize(rng.normal(size=(2, 2, 2))))
        u = np.array([0.3, -0.7])
        h = 1e-6
        fd = [(s.height(u + h * e) - s.height(u - h * e)) / (2 * h) for e in np.eye(2)]
        assert s.gradient(u) == pytest.approx(fd, abs=1e-7)

    def test_rejects_asymmetric_d(self):
        with pytest.raises(InvalidArgumentError):
            BoundarySurface(3, [[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 2, 2)))

    def test_rejects_p_below_two(self):
        with pytest.raises(InvalidArgumentError):
            BoundarySurface.flat(1)

    def test_flat_flag(self):
        assert BoundarySurface.flat(3).is_flat
        assert not BoundarySurface.from_curvature([[0.1]]).is_flat


class TestFrame:
    def test_normal_points_up_and_is_unit(self):
        s = BoundarySurface.from_curvature([[0.4]])
        f = frame_at(s, None, [0.8])
        assert f.normal[-1] > 0
        assert f.normal @ f.normal == pytest.approx(1.0)
        assert f.tangents @ f.normal == pytest.approx([0.0], abs=1e-14)

    def test_metric_unit_normal(self):
        ten = PotentialTensors(2, 0.2 * symmetrize(np.ones((2, 2, 2))), np.zeros((2,) * 4))
        s = BoundarySurface.from_curvature([[0.1]])
        f = frame_at(s, ten, [0.5])
        assert f.normal @ f.metric @ f.normal == pytest.approx(1.0)
        assert f.tangents @ f.metric @ f.normal == pytest.approx([0.0], abs=1e-14)

    def test_indefinite_metric_raises(self):
        ten = PotentialTensors(2, 5.0 * symmetrize(np.ones((2, 2, 2))), np.zeros((2,) * 4))
        s = BoundarySurface.flat(2)
        with pytest.raises(NumericDomainError):
            frame_at(s, ten, [-3.0])


class TestProjection:
    @settings(max_examples=40, deadline=None)
    @given(u=coord, v=st.floats(-1.0, 1.0))
    def test_round_trip_gaussian(self, u, v):
        s = BoundarySurface.from_curvature([[0.2]], [[[0.05]]])
        tp = project(s, None, embed(s, None, TubePoint([u], v)))
        assert tp.u == pytest.approx([u], abs=1e-8)
        assert tp.v == pytest.approx(v, abs=1e-8)

    @settings(max_examples=20, deadline=None)
    @given(u1=coord, u2=coord, v=st.floats(-0.8, 0.8))
    def test_round_trip_curved_metric_p3(self, u1, u2, v):
        rng = np.random.default_rng(2)
        s = BoundarySurface(3, 0.1 * symmetrize(rng.normal(size=(2, 2))), np.zeros((2, 2, 2)))
        ten = PotentialTensors(3, 0.05 * symmetrize(rng.normal(size=(3,) * 3)), np.zeros((3,) * 4))
        tp = project(s, ten, embed(s, ten, TubePoint([u1, u2], v)))
        assert tp.u == pytest.approx([u1, u2], abs=1e-7)
        assert tp.v == pytest.approx(v, abs=1e-7)

    def test_flat_projection_is_trivial(self):
        tp = project(BoundarySurface.flat(3), None, [0.3, -0.2, 1.7])
        assert tp.u == pytest.approx([0.3, -0.2])
        assert tp.v == pytest.approx(1.7)

    def test_equidistant_feet_are_degenerate(self):
        # The focal point of a parabola below the region has two nearest feet.
        s = BoundarySurface.from_curvature([[0.5]])
        with pytest.raises(DegenerateInputError):
            project(s, None, [0.0, -3.0])

    def test_batch_matches_scalar(self):
        s = BoundarySurface.from_curvature([[0.3]], [[[0.1]]])
        y = np.array([[0.2, 0.5], [-0.4, -0.3], [1.0, 1.2]])
        u, v = project_points(s, y)
        for row, ui, vi in zip(y, u, v):
            tp = project(s, None, row)
            assert ui == pytest.approx(tp.u, abs=1e-9)
            assert vi == pytest.approx(tp.v, abs=1e-9)

    def test_parallel_surface_inverts_projection(self):
        s = BoundarySurface.from_curvature([[0.3]], [[[0.1]]])
        ya = np.array([[-0.5], [0.0], [0.7]])
        v = np.array([0.4, -0.3, 1.1])
        yp = parallel_surface_height(s, ya, v)
        _, got = project_points(s, np.column_stack([ya, yp]))
        assert got == pytest.approx(v, abs=1e-10)


class TestJacobian:
    def test_known_value(self):
        s = BoundarySurface.from_curvature([[0.1]])
        assert log_jacobian_asymptotic(s, None, TubePoint([0.0], 0.5)) == pytest.approx(0.095, abs=1e-12)

    def test_zero_at_origin(self):
        s = BoundarySurface.from_curvature([[0.3]])
        assert log_jacobian_numeric(s, None, TubePoint([0.0], 0.0)) == pytest.approx(0.0, abs=1e-9)

    def test_asymptotic_tracks_numeric_for_small_curvature(self):
        s = BoundarySurface.from_curvature([[0.02]])
        tp = TubePoint([0.3], 0.4)
        assert log_jacobian_asymptotic(s, None, tp) == pytest.approx(log_jacobian_numeric(s, None, tp), abs=1e-5)
