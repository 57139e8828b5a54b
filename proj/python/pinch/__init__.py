"""Pinching-antenna NOMA placement, power allocation and simulation."""

from ._pinch import (
    BudgetExceeded,
    ConfigError,
    CorruptArtifact,
    DegenerateChannel,
    DegenerateGeometry,
    Infeasible,
    PinchError,
    SystemConfig,
    channel_gains,
    maxmin_power,
    min_power,
    optimize_placement,
    predict_power,
    run_sweep,
    simplex_project,
    system_from_json,
    user_rates,
)

__all__ = [
    "BudgetExceeded",
    "ConfigError",
    "CorruptArtifact",
    "DegenerateChannel",
    "DegenerateGeometry",
    "Infeasible",
    "PinchError",
    "SystemConfig",
    "channel_gains",
    "maxmin_power",
    "min_power",
    "optimize_placement",
    "predict_power",
    "run_sweep",
    "simplex_project",
    "system_from_json",
    "user_rates",
]
