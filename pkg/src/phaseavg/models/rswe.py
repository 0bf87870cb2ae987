"""Nondimensional f-plane rotating shallow water equations in one dimension.

Spectral state ``[u, v, phi]``. The linear operator has a zero (Rossby) branch,
so ``L`` is singular and its Moore-Penrose pseudoinverse stands in for the
inverse. Products are taken in physical space; hyperviscosity ``-mu k^4``
stabilizes the scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phaseavg.models.base import ModelSystem, TrigPhases
from phaseavg.numerics import BlockOperator, GridSpec, dft_forward, dft_inverse


@dataclass(frozen=True)
class RSWEParams:
    eps: float = 0.1
    mu: float = 1e-4


def rswe_blocks(k: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``L``, ``L^+`` and ``L L^+`` blocks for wavenumbers ``k``."""
    k = np.asarray(k, dtype=float)
    psi2 = 1.0 + k * k
    ik = 1j * k
    n = len(k)
    L = np.zeros((n, 3, 3), dtype=complex)
    L[:, 0, 1] = -1.0
    L[:, 0, 2] = ik
    L[:, 1, 0] = 1.0
    L[:, 2, 0] = ik
    Lp = np.zeros((n, 3, 3), dtype=complex)
    Lp[:, 0, 1] = 1.0 / psi2
    Lp[:, 0, 2] = -ik / psi2
    Lp[:, 1, 0] = -1.0 / psi2
    Lp[:, 2, 0] = -ik / psi2
    LLp = np.zeros((n, 3, 3), dtype=complex)
    LLp[:, 0, 0] = 1.0
    LLp[:, 1, 1] = 1.0 / psi2
    LLp[:, 1, 2] = -ik / psi2
    LLp[:, 2, 1] = ik / psi2
    LLp[:, 2, 2] = k * k / psi2
    return L, Lp, LLp


class RSWEModel(TrigPhases, ModelSystem):
    name = "rswe"
    error_kind = "rswe_l2"

    def __init__(self, params: RSWEParams | None = None, grid: GridSpec | None = None):
        p = params or RSWEParams()
        if not 0 < p.eps <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {p.eps}")
        self.params = p
        self.eps = p.eps
        self.mu = p.mu
        self.grid = grid or GridSpec(32)
        # first derivatives use the Nyquist-zeroed wavenumbers so real fields stay real
        self.k = self.grid.k_odd.astype(float)
        self.psi = np.sqrt(1.0 + self.k**2)
        self.omega_max = float(self.psi.max())
        self.rates = self.psi / self.eps
        self.damping = -self.mu * self.grid.k.astype(float) ** 4
        L, Lp, LLp = rswe_blocks(self.k)
        self.L = BlockOperator(L, skew_hermitian=True)
        self.Linv = BlockOperator(Lp)
        self.LLinv = BlockOperator(LLp)
        self._ik = 1j * self.k
        self._inv_psi = 1.0 / self.psi
        self._inv_psi2 = self._inv_psi**2

    def exp_blocks(self, t, sign=1):
        c, s = self.phases(t)
        k, psi = self.k, self.psi
        psi2 = psi * psi
        ik = 1j * k
        out = np.empty(c.shape + (3, 3), dtype=complex)
        out[..., 0, 0] = c
        out[..., 0, 1] = -sign * s / psi
        out[..., 0, 2] = sign * ik * s / psi
        out[..., 1, 0] = sign * s / psi
        out[..., 1, 1] = (k * k + c) / psi2
        out[..., 1, 2] = ik * (1.0 - c) / psi2
        out[..., 2, 0] = sign * ik * s / psi
        out[..., 2, 1] = ik * (c - 1.0) / psi2
        out[..., 2, 2] = (1.0 + k * k * c) / psi2
        return out

    def apply_phases(self, phases, U, sign=1):
        # the exp_blocks entries written out per component, with the
        # geostrophic departure q = (v - ik phi) / psi^2
        c, s = phases
        if sign < 0:
            s = -s
        U = np.asarray(U)
        u, v, phi = U[..., 0, :], U[..., 1, :], U[..., 2, :]
        q = (v - self._ik * phi) * self._inv_psi2
        r = (c - 1.0) * q + s * u * self._inv_psi
        out = np.empty(np.broadcast_shapes(c.shape[:-1] + (3, 1), U.shape), dtype=complex)
        out[..., 0, :] = c * u - s * self.psi * q
        out[..., 1, :] = v + r
        out[..., 2, :] = phi + self._ik * r
        return out

    def nonlinear(self, U):
        U = np.asarray(U)
        spec = np.concatenate([U, self._ik * U[..., :2, :]], axis=-2)
        phys = dft_inverse(spec)
        u = phys[..., 0:1, :]
        prods = u * phys[..., (3, 4, 2), :]
        out = -dft_forward(prods)
        out[..., 2, :] *= self._ik
        return out

    def dissipated_nonlinear(self, U):
        return self.nonlinear(U) + self.damping * np.asarray(U)

    def initial_state(self):
        x = self.grid.x
        phi = np.exp(-((x - np.pi) ** 2) / 2.0)
        zeros = np.zeros(self.grid.N)
        return dft_forward(np.stack([zeros, zeros, phi])).astype(complex)

    def physical(self, U):
        return np.real(dft_inverse(np.asarray(U)))

    def describe(self):
        return {"model": self.name, "eps": self.eps, "mu": self.mu, "N_x": self.grid.N}
