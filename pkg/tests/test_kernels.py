import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mboot._ext import kernels, pykernels
from mboot.engines import gauss_hermite, product_rule
from mboot.tensors import symmetrize

ckernels = pytest.importorskip("mboot._ext._ckernels")


def _surface(rng, k):
    return 0.2 * symmetrize(rng.normal(size=(k, k))), 0.05 * symmetrize(rng.normal(size=(k,) * 3))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 3), tau=st.floats(0.3, 2.0))
def test_graph_prob_parity(seed, k, tau):
    rng = np.random.default_rng(seed)
    d, e = _surface(rng, k)
    ya = rng.normal(size=(17, k))
    yp = rng.normal(size=17)
    nodes, weights = product_rule(gauss_hermite(10), k)
    p_py, d_py = pykernels.graph_prob(ya, yp, tau, nodes, weights, d, e)
    p_c, d_c = ckernels.graph_prob(ya, yp, tau, nodes, weights, d, e)
    assert p_c == pytest.approx(p_py, abs=1e-13)
    assert d_c == pytest.approx(d_py, abs=1e-13)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 3))
def test_graph_inner_means_parity(seed, k):
    rng = np.random.default_rng(seed)
    d, e = _surface(rng, k)
    ya = rng.normal(size=(9, k))
    yp = rng.normal(size=9)
    z = rng.normal(size=(9, 31, k + 1))
    assert np.array_equal(
        pykernels.graph_inner_means(ya, yp, 0.9, z, d, e), ckernels.graph_inner_means(ya, yp, 0.9, z, d, e)
    )


def test_density_is_derivative():
    rng = np.random.default_rng(1)
    d, e = _surface(rng, 1)
    ya = np.array([[0.3]])
    nodes, weights = product_rule(gauss_hermite(60), 1)
    h = 1e-6
    up = kernels.graph_prob(ya, np.array([0.5 + h]), 1.0, nodes, weights, d, e)[0]
    dn = kernels.graph_prob(ya, np.array([0.5 - h]), 1.0, nodes, weights, d, e)[0]
    dens = kernels.graph_prob(ya, np.array([0.5]), 1.0, nodes, weights, d, e)[1]
    assert dens == pytest.approx(-(up - dn) / (2 * h), rel=1e-6)


def test_compiled_backend_selected():
    assert kernels.BACKEND == "cython"


def test_pure_python_fallback_env():
    code = "from mboot._ext import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"MBOOT_PURE_PYTHON": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
