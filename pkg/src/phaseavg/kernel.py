"""Exponential-bump averaging kernel and its discrete node rule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GAMMA = 4.0
DEFAULT_P = 4.0
DEFAULT_K_MIN = 8


@dataclass(frozen=True)
class AveragingKernel:
    """Discrete averaging kernel on the window ``(-eta/2, eta/2)``.

    Weights sum to one; nodes and weights are symmetric about ``s = 0``.
    """

    eta: float
    gamma: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def K(self) -> int:
        return len(self.nodes)

    def average(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the leading (node) axis, accumulated in node order."""
        w = self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        # a reduction over the outermost axis of a contiguous array is a
        # sequential row-by-row accumulation in numpy, k = 0, 1, ..., K-1
        return np.add.reduce(np.ascontiguousarray(w * values), axis=0)

    def oscillation_factor(self, omega: float, eps: float = 1.0) -> complex:
        """Discrete average of ``exp(i omega s / eps)`` over the kernel."""
        return complex(np.sum(self.weights * np.exp(1j * omega * self.nodes / eps)))


def kernel_profile(s, eta: float, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    """Unnormalized bump ``exp(-eta / (gamma (eta/2 + s)(eta/2 - s)))``, zero outside."""
    s = np.asarray(s, dtype=float)
    gap = 0.25 * eta * eta - s * s
    out = np.zeros_like(s)
    inside = gap > 0
    out[inside] = np.exp(-eta / (gamma * gap[inside]))
    return out


def build_kernel(eta: float, gamma: float = DEFAULT_GAMMA, K: int = DEFAULT_K_MIN) -> AveragingKernel:
    """Midpoint nodes ``s_k = ((2k-1)/(2K) - 1/2) eta`` with normalized bump weights.

    ``eta = 0`` gives the single node ``s = 0`` with weight one.
    """
    if K < 1:
        raise ValueError(f"kernel needs at least one node, got K={K}")
    if eta < 0:
        raise ValueError(f"window length must be non-negative, got eta={eta}")
    if gamma <= 0:
        raise ValueError(f"decay rate must be positive, got gamma={gamma}")
    if eta == 0:
        return AveragingKernel(0.0, gamma, np.zeros(1), np.ones(1))

    # integer numerators make s_k = -s_{K+1-k} hold exactly
    numer = 2.0 * np.arange(1, K + 1) - 1.0 - K
    u = numer / (2.0 * K)
    nodes = u * eta
    # bump in window-scaled form, shifted so the central nodes carry exp(0);
    # this stays finite even when 1/eta overflows
    inv_gap = 1.0 / (0.25 - u * u)
    excess = inv_gap - inv_gap.min()
    with np.errstate(over="ignore", invalid="ignore"):
        log_raw = np.where(excess == 0, 0.0, -excess / (gamma * eta))
    raw = np.exp(log_raw)
    weights = raw / raw.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return AveragingKernel(float(eta), float(gamma), nodes, weights)


def sample_count(
    eta: float,
    omega_max: float,
    eps: float,
    P: float = DEFAULT_P,
    K_min: int = DEFAULT_K_MIN,
) -> int:
    """Node count ``max(K_min, ceil(P eta omega_max / (2 pi eps)))``; one node when eta = 0."""
    if eta == 0:
        return 1
    return max(int(K_min), int(math.ceil(P * eta * omega_max / (2.0 * math.pi * eps))))


def kernel_for(
    eta: float,
    omega_max: float,
    eps: float,
    gamma: float = DEFAULT_GAMMA,
    P: float = DEFAULT_P,
    K_min: int = DEFAULT_K_MIN,
) -> AveragingKernel:
    """Kernel over window ``eta`` with node count from :func:`sample_count`."""
    return build_kernel(eta, gamma, sample_count(eta, omega_max, eps, P, K_min))
