"""Single oscillator with constant forcing, ``du/dt + i omega u / eps = c``."""

from __future__ import annotations

import numpy as np

from phaseavg.models.base import ModelSystem
from phaseavg.numerics import BlockOperator


class ConstantForcingModel(ModelSystem):
    name = "scalar"
    error_kind = "abs"

    def __init__(self, omega: float = 1.0, eps: float = 0.1, c: complex = 1.0, u0: complex = 1.0):
        self.omega = float(omega)
        self.eps = float(eps)
        self.c = complex(c)
        self.u0 = complex(u0)
        self.omega_max = abs(self.omega)
        self.L = BlockOperator(np.array([[[1j * self.omega]]]), skew_hermitian=True)
        self.Linv = BlockOperator(np.array([[[-1j / self.omega]]]))
        self.LLinv = BlockOperator(np.ones((1, 1, 1)))

    def exp_blocks(self, t, sign=1):
        t = np.asarray(t, dtype=float)
        return np.exp(sign * 1j * self.omega * t / self.eps)[..., None, None, None]

    def nonlinear(self, U):
        return np.full(np.shape(U), self.c, dtype=complex)

    def initial_state(self):
        return np.array([[self.u0]])

    def physical(self, U):
        return np.asarray(U)

    def describe(self):
        return {"model": self.name, "eps": self.eps, "omega": self.omega, "c": self.c}
