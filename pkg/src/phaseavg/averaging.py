"""Phase-averaged tendencies and mean corrections.

All kernel nodes are evaluated in one batched pass; the weighted sum is then
accumulated in ascending node order (see :meth:`AveragingKernel.average`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phaseavg.kernel import (
    DEFAULT_GAMMA,
    DEFAULT_K_MIN,
    DEFAULT_P,
    AveragingKernel,
    build_kernel,
    kernel_for,
)
from phaseavg.models.base import ModelSystem

POINTWISE = build_kernel(0.0)


@dataclass(frozen=True)
class MeanCorrection:
    C: np.ndarray
    strategy: str = "local"
    eta_C: float | None = None


def phase_averaged_rhs(model: ModelSystem, Vbar: np.ndarray, t: float, kernel: AveragingKernel) -> np.ndarray:
    """Kernel average of ``e^{(t+s)L/eps} N*(e^{-(t+s)L/eps} Vbar)`` over the nodes ``s``."""
    ph = model.phases(t, kernel.nodes)
    X = model.apply_phases(ph, Vbar, -1)
    F = model.apply_phases(ph, model.dissipated_nonlinear(X), 1)
    return kernel.average(F)


def modvar_rhs(model: ModelSystem, V: np.ndarray, t: float) -> np.ndarray:
    """Unaveraged modulation-variable tendency (the zero-width kernel)."""
    return phase_averaged_rhs(model, V, t, POINTWISE)


def local_mean_correction(
    model: ModelSystem, W: np.ndarray, t: float, kernel_C: AveragingKernel
) -> MeanCorrection:
    """Windowed mean of ``N(e^{-(t+r)L/eps} W)``.

    Uses the undissipated nonlinearity and no forward exponential.
    """
    X = model.apply_phases(model.phases(t, kernel_C.nodes), W, -1)
    C = kernel_C.average(model.nonlinear(X))
    return MeanCorrection(C, "local", kernel_C.eta)


def mean_corrected_rhs(
    model: ModelSystem, Wbar: np.ndarray, t: float, kernel: AveragingKernel, C: np.ndarray
) -> np.ndarray:
    """Averaged tendency of the mean-corrected modulation variable.

    ``sum_k w_k e^{(t+s_k)L/eps} [N*(e^{-(t+s_k)L/eps} Wbar + eps L^+ C) - L L^+ C]``
    """
    shift = model.eps * model.apply_Linv(C)
    resid = model.apply_LLinv(C)
    ph = model.phases(t, kernel.nodes)
    X = model.apply_phases(ph, Wbar, -1) + shift
    F = model.apply_phases(ph, model.dissipated_nonlinear(X) - resid, 1)
    return kernel.average(F)


class NoCorrection:
    """``C = 0``: the mean-corrected pipeline reduces to plain phase averaging."""

    name = "none"
    K = 0

    def __init__(self, model: ModelSystem):
        self.model = model

    def __call__(self, W, t):
        return np.zeros(np.shape(W), dtype=complex)


class ClassicalCorrection:
    """Closed-form infinite-window mean supplied by the model."""

    name = "classical"
    K = 0

    def __init__(self, model: ModelSystem):
        if not model.has_classical_correction:
            raise ValueError(f"model {model.name!r} has no classical mean correction")
        self.model = model

    def __call__(self, W, t):
        return self.model.classical_correction(W)


class LocalCorrection:
    """Finite-window mean correction over ``eta_C``."""

    name = "local"

    def __init__(
        self,
        model: ModelSystem,
        eta_C: float,
        gamma: float = DEFAULT_GAMMA,
        P: float = DEFAULT_P,
        K_min: int = DEFAULT_K_MIN,
    ):
        self.model = model
        self.eta_C = float(eta_C)
        self.kernel = kernel_for(eta_C, model.omega_max, model.eps, gamma, P, K_min)

    @property
    def K(self) -> int:
        return self.kernel.K

    def __call__(self, W, t):
        return local_mean_correction(self.model, W, t, self.kernel).C


def make_correction(model: ModelSystem, strategy: str, eta_C: float | None = None, **kernel_kw):
    """Correction callable ``(W, t) -> C`` for ``strategy`` in {none, classical, local}."""
    if strategy == "none":
        return NoCorrection(model)
    if strategy == "classical":
        return ClassicalCorrection(model)
    if strategy == "local":
        if eta_C is None:
            raise ValueError("local mean correction needs a window eta_C")
        return LocalCorrection(model, eta_C, **kernel_kw)
    raise ValueError(f"unknown mean-correction strategy {strategy!r}")
