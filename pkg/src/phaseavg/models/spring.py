"""Swinging spring: elastic pendulum with swing and spring normal modes.

The complex state ``[x + i p_x, y + i p_y, z + i p_z]`` turns the second-order
system into three first-order equations; real parts are positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phaseavg.models.base import ModelSystem, TrigPhases
from phaseavg.numerics import BlockOperator


@dataclass(frozen=True)
class SpringParams:
    rho: float = 2.0
    omega_R: float = np.pi
    l0: float = 1.2
    l: float = 1.0
    eps: float = 1.0

    @property
    def omega_Z(self) -> float:
        return self.rho * self.omega_R

    @property
    def lam(self) -> float:
        return self.l0 * self.omega_Z**2 / self.l**2


DEFAULT_U0 = np.array([0.04, 0.03427j / np.pi, 0.08])


class SpringModel(TrigPhases, ModelSystem):
    name = "spring"
    error_kind = "spring_l2"
    has_classical_correction = True

    def __init__(self, params: SpringParams | None = None, u0=None):
        p = params or SpringParams()
        if p.rho <= 0:
            raise ValueError(f"resonance factor must be positive, got {p.rho}")
        self.params = p
        self.eps = p.eps
        self.rho = p.rho
        self.omega_R = p.omega_R
        self.lam = p.lam
        self.freqs = np.array([p.omega_R, p.omega_R, p.rho * p.omega_R])
        self.omega_max = float(self.freqs.max())
        self.rates = self.freqs / self.eps
        self.L = BlockOperator(np.diag(1j * self.freqs)[None], skew_hermitian=True)
        self.Linv = BlockOperator(np.diag(-1j / self.freqs)[None])
        self.LLinv = BlockOperator(np.eye(3)[None])
        self._u0 = DEFAULT_U0 if u0 is None else np.asarray(u0, dtype=complex)

    def exp_blocks(self, t, sign=1):
        c, s = self.phases(t)
        out = np.zeros(c.shape[:-1] + (1, 3, 3), dtype=complex)
        out[..., 0, [0, 1, 2], [0, 1, 2]] = c + sign * 1j * s
        return out

    def apply_phases(self, phases, U, sign=1):
        c, s = phases
        return (c + sign * 1j * s)[..., None] * U

    def nonlinear(self, U):
        U = np.asarray(U)
        x, y, z = np.real(U[..., 0, :]), np.real(U[..., 1, :]), np.real(U[..., 2, :])
        lam, wR, rho = self.lam, self.omega_R, self.rho
        out = np.empty(U.shape, dtype=complex)
        out[..., 0, :] = 1j * lam / wR * x * z
        out[..., 1, :] = 1j * lam / wR * y * z
        out[..., 2, :] = 1j * lam / (2.0 * rho * wR) * (x * x + y * y)
        return out

    def classical_correction(self, W):
        """Infinite-window mean of the nonlinearity: only the z slot survives."""
        W = np.asarray(W)
        radial = np.abs(W[..., 0, :]) ** 2 + np.abs(W[..., 1, :]) ** 2
        C = np.zeros(W.shape, dtype=complex)
        C[..., 2, :] = 1j * self.lam / (4.0 * self.rho * self.omega_R) * radial
        return C

    def initial_state(self):
        return self._u0.reshape(3, 1).astype(complex)

    def physical(self, U):
        return np.real(U)

    def describe(self):
        return {"model": self.name, "eps": self.eps, "rho": self.rho}
