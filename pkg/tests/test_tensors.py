import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mboot.errors import InvalidArgumentError
from mboot.tensors import PotentialTensors, is_symmetric, symmetrize


@settings(max_examples=30)
@given(arrays(float, (3, 3, 3), elements=st.floats(-10, 10)))
def test_symmetrize_is_symmetric_and_idempotent(t):
    s = symmetrize(t)
    assert is_symmetric(s, atol=1e-12)
    assert symmetrize(s) == pytest.approx(s, abs=1e-12)


def test_rejects_asymmetric():
    f3 = np.zeros((2, 2, 2))
    f3[0, 0, 1] = 1.0
    with pytest.raises(InvalidArgumentError):
        PotentialTensors(2, f3, np.zeros((2,) * 4))


def test_metric_is_hessian_of_potential():
    rng = np.random.default_rng(0)
    ten = PotentialTensors(3, 0.3 * symmetrize(rng.normal(size=(3,) * 3)), 0.2 * symmetrize(rng.normal(size=(3,) * 4)))
    eta = np.array([0.2, -0.4, 0.1])
    h = 1e-4
    hess = np.empty((3, 3))
    for i, ei in enumerate(np.eye(3)):
        for j, ej in enumerate(np.eye(3)):
            hess[i, j] = (
                ten.potential(eta + h * ei + h * ej) - ten.potential(eta + h * ei - h * ej)
                - ten.potential(eta - h * ei + h * ej) + ten.potential(eta - h * ei - h * ej)
            ) / (4 * h * h)
    assert ten.metric(eta) == pytest.approx(hess, abs=1e-6)


def test_zeros_is_gaussian():
    assert PotentialTensors.zeros(2).is_gaussian
    assert not PotentialTensors.zeros(2).scaled(1, 1).phi3.any()
