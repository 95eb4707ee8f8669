"""Protograph EXIT analysis over parallel bi-AWGN channels."""

from .engine import (
    ConvergenceResult,
    ExitState,
    Schedule,
    build_snr_vector,
    channel_sigma,
    converges,
    exit_sweep,
)
from .jfunction import JFunction, default_j, j_function, j_inverse
from .thresholds import (
    BoundaryRangeError,
    ComparisonRow,
    LambdaSweepResult,
    ThresholdResult,
    comparison_table,
    estimate_map_threshold,
    min_gamma2_on_boundary,
    optimize_lambda,
    threshold_for_lambda,
    uniform_threshold,
)

__all__ = [
    "JFunction",
    "default_j",
    "j_function",
    "j_inverse",
    "ExitState",
    "Schedule",
    "ConvergenceResult",
    "exit_sweep",
    "converges",
    "channel_sigma",
    "build_snr_vector",
    "ThresholdResult",
    "LambdaSweepResult",
    "ComparisonRow",
    "BoundaryRangeError",
    "uniform_threshold",
    "min_gamma2_on_boundary",
    "threshold_for_lambda",
    "optimize_lambda",
    "estimate_map_threshold",
    "comparison_table",
]
