"""Kernel selection: compiled module when importable, numpy otherwise.

Set ``MBOOT_PURE_PYTHON=1`` before import to force the numpy kernels.
"""
import os

from . import pykernels

BACKEND = "python"
graph_prob = pykernels.graph_prob
graph_inner_means = pykernels.graph_inner_means

if os.environ.get("MBOOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        graph_prob = _ckernels.graph_prob
        graph_inner_means = _ckernels.graph_inner_means


def backend_functions(name):
    """Kernel namespace for ``name`` in {"python", "cython"}; for benchmarks."""
    if name == "python":
        return pykernels
    from . import _ckernels

    return _ckernels
