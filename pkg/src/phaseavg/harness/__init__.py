from phaseavg.harness.config import ConfigError, SweepConfig, preset
from phaseavg.harness.metrics import TimeGridMismatch, error_metric
from phaseavg.harness.sweep import (
    CSV_HEADER,
    ErrorReport,
    run_experiment,
    select_windows,
    zeta_sweep,
)

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "ErrorReport",
    "SweepConfig",
    "TimeGridMismatch",
    "error_metric",
    "preset",
    "run_experiment",
    "select_windows",
    "zeta_sweep",
]
