"""Multiscale bootstrap probabilities, calibrated z-values and order studies."""
from .estimate import (
    DEFAULT_SCALES,
    BootstrapEstimate,
    MonteCarloEngine,
    QuadratureEngine,
    ScaleSchedule,
    resolve_engine,
    scale_from_resample_size,
)
from .probability import alpha1, bp1, bp2, bp3, density_bp1, multistep
from .calibration import double_bootstrap_z, pivot, pivot_z
from .order import (
    ORDER_METHODS,
    OrderReport,
    SurfaceFamily,
    accuracy_order_study,
    pivot_cdf,
    rejection_rate,
)

__all__ = [
    "DEFAULT_SCALES",
    "density_bp1",
    "BootstrapEstimate",
    "MonteCarloEngine",
    "QuadratureEngine",
    "ScaleSchedule",
    "resolve_engine",
    "scale_from_resample_size",
    "bp1",
    "bp2",
    "bp3",
    "multistep",
    "alpha1",
    "pivot",
    "pivot_z",
    "double_bootstrap_z",
    "ORDER_METHODS",
    "OrderReport",
    "SurfaceFamily",
    "accuracy_order_study",
    "pivot_cdf",
    "rejection_rate",
]
