"""Multiscale bootstrap probabilities with asymptotic and numerical calibration."""
from ._ext.kernels import BACKEND
from .bootstrap import (
    BootstrapEstimate,
    MonteCarloEngine,
    QuadratureEngine,
    SurfaceFamily,
    accuracy_order_study,
    bp1,
    bp2,
    bp3,
    double_bootstrap_z,
    multistep,
    pivot,
    pivot_z,
)
from .config import ExperimentConfig, load_config, parse_config
from .errors import ConvergenceError, DegenerateInputError, InvalidArgumentError, NumericDomainError
from .geometry import BoundarySurface
from .tensors import PotentialTensors

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BootstrapEstimate",
    "MonteCarloEngine",
    "QuadratureEngine",
    "SurfaceFamily",
    "accuracy_order_study",
    "bp1",
    "bp2",
    "bp3",
    "double_bootstrap_z",
    "multistep",
    "pivot",
    "pivot_z",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "ConvergenceError",
    "DegenerateInputError",
    "InvalidArgumentError",
    "NumericDomainError",
    "BoundarySurface",
    "PotentialTensors",
    "__version__",
]
