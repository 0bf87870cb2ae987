"""Finite-window phase averaging with mean-corrected modulation variables."""

from phaseavg.averaging import (
    local_mean_correction,
    make_correction,
    mean_corrected_rhs,
    modvar_rhs,
    phase_averaged_rhs,
)
from phaseavg.integrators import (
    RK4,
    Trajectory,
    init_mean_corrected,
    integrate_mean_corrected,
    integrate_modvar,
    integrate_phase_averaged,
    integrate_standard,
)
from phaseavg.kernel import AveragingKernel, build_kernel, kernel_for, sample_count
from phaseavg.models import make_model

__version__ = "0.1.0"

__all__ = [
    "RK4",
    "AveragingKernel",
    "Trajectory",
    "build_kernel",
    "init_mean_corrected",
    "integrate_mean_corrected",
    "integrate_modvar",
    "integrate_phase_averaged",
    "integrate_standard",
    "kernel_for",
    "local_mean_correction",
    "make_correction",
    "make_model",
    "mean_corrected_rhs",
    "modvar_rhs",
    "phase_averaged_rhs",
    "sample_count",
]
