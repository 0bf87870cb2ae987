"""Klein-Gordon-type equation ``u_tt + (u - u_xx) / eps^2 = -u^2`` on a periodic grid.

Spectral state ``[a, b]`` with ``a = (omega/eps) u`` and ``b = u_t`` per mode,
``omega = sqrt(1 + k^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phaseavg.models.base import ModelSystem, TrigPhases
from phaseavg.numerics import BlockOperator, GridSpec, dft_forward, dft_inverse


@dataclass(frozen=True)
class KGParams:
    eps: float = 0.1


class KGModel(TrigPhases, ModelSystem):
    name = "kg"
    error_kind = "kg_l1"
    has_classical_correction = True

    def __init__(self, params: KGParams | None = None, grid: GridSpec | None = None):
        p = params or KGParams()
        if not 0 < p.eps <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {p.eps}")
        self.params = p
        self.eps = p.eps
        self.grid = grid or GridSpec(32)
        k = self.grid.k.astype(float)
        self.omega = np.sqrt(1.0 + k * k)
        self.omega_max = float(np.sqrt(1.0 + self.grid.k_max**2))
        self.rates = self.omega / self.eps

        n = self.grid.N
        L = np.zeros((n, 2, 2), dtype=complex)
        L[:, 0, 1] = -self.omega
        L[:, 1, 0] = self.omega
        Linv = np.zeros((n, 2, 2), dtype=complex)
        Linv[:, 0, 1] = 1.0 / self.omega
        Linv[:, 1, 0] = -1.0 / self.omega
        self.L = BlockOperator(L, skew_hermitian=True)
        self.Linv = BlockOperator(Linv)
        self.LLinv = BlockOperator(np.broadcast_to(np.eye(2), (n, 2, 2)))

    def exp_blocks(self, t, sign=1):
        c, s = self.phases(t)
        out = np.empty(c.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = c
        out[..., 0, 1] = -sign * s
        out[..., 1, 0] = sign * s
        out[..., 1, 1] = c
        return out

    def apply_phases(self, phases, U, sign=1):
        c, s = phases
        if sign < 0:
            s = -s
        a, b = U[..., 0, :], U[..., 1, :]
        out = np.empty(np.broadcast_shapes(c.shape[:-1] + (2, 1), U.shape), dtype=complex)
        out[..., 0, :] = c * a - s * b
        out[..., 1, :] = s * a + c * b
        return out

    def u_hat(self, U):
        """Spectrum of the physical displacement ``u = (eps/omega) a``."""
        return self.eps * np.asarray(U)[..., 0, :] / self.omega

    def nonlinear(self, U):
        # -(u_hat conv u_hat), taken through physical space
        u = dft_inverse(self.u_hat(U))
        out = np.zeros(np.shape(U), dtype=complex)
        out[..., 1, :] = -dft_forward(u * u)
        return out

    def classical_correction(self, W):
        return kg_classical_correction(W, self.omega, self.eps)

    def initial_state(self):
        x = self.grid.x
        a = np.exp(-((x - np.pi) ** 2) / 2.0)
        return np.stack([dft_forward(a), np.zeros(self.grid.N, dtype=complex)])

    def physical(self, U):
        """Physical-space ``a`` field, the quantity the KG error compares."""
        return np.real(dft_inverse(np.asarray(U)[..., 0, :]))

    def describe(self):
        return {"model": self.name, "eps": self.eps, "N_x": self.grid.N}


def _zero_frequency_mean(spec: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Long-time mean of ``(f cos) conv (f cos)`` with ``f = spec/omega``, up to sign and eps^2.

    Only pairs with equal frequency survive averaging: every pair ``(j, -j)``
    for the zero mode, and ``2j = i (mod N)`` for even ``i``.
    """
    N = spec.shape[-1]
    out = np.zeros(spec.shape, dtype=complex)
    mirrored = spec[..., (-np.arange(N)) % N]
    out[..., 0] = np.sum(spec * mirrored / omega**2, axis=-1) / (2 * N)
    sq = spec * spec / omega**2
    # i = 2, 4, ..., N-2 pairs with j = i/2 and j = (i+N)/2
    half = N // 2
    out[..., 2::2] = (sq[..., 1:half] + sq[..., half + 1:]) / (2 * N)
    return out


def kg_classical_correction(W: np.ndarray, omega: np.ndarray, eps: float) -> np.ndarray:
    """Closed-form infinite-window mean correction ``[0, C_b]`` for the KG model.

    ``W = [c_hat, d_hat]``. The cross terms in c and d average to zero, leaving
    the cos-cos and sin-sin contributions.
    """
    W = np.asarray(W)
    if W.shape[-1] != len(omega):
        raise ValueError(f"spectrum length {W.shape[-1]} does not match {len(omega)} modes")
    if W.shape[-1] % 2:
        raise ValueError("classical KG correction needs an even number of modes")
    c_hat, d_hat = W[..., 0, :], W[..., 1, :]
    C = np.zeros(W.shape, dtype=complex)
    C[..., 1, :] = -(eps**2) * (_zero_frequency_mean(c_hat, omega) + _zero_frequency_mean(d_hat, omega))
    return C
