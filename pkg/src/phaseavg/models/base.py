from __future__ import annotations

import numpy as np

from phaseavg.numerics import BlockOperator, apply_blocks


class ModelSystem:
    """Oscillatory system ``dU/dt + L U / eps = N(U)`` in spectral form.

    Subclasses set ``L``, ``Linv`` (a pseudoinverse where ``L`` is singular),
    ``LLinv``, ``eps`` and ``omega_max``, and implement :meth:`exp_blocks`,
    :meth:`nonlinear` and :meth:`initial_state`. States are ``(n_fields,
    n_modes)`` arrays; every method accepts extra leading batch axes.
    """

    name = "model"
    error_kind = "l2"
    eps: float
    omega_max: float
    L: BlockOperator
    Linv: BlockOperator
    LLinv: BlockOperator

    @property
    def n_fields(self) -> int:
        return self.L.m

    @property
    def n_modes(self) -> int:
        return self.L.n_modes

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_fields, self.n_modes)

    def exp_blocks(self, t, sign: int = 1) -> np.ndarray:
        """Blocks of ``exp(sign * t * L / eps)``, shape ``t.shape + (n_modes, m, m)``."""
        raise NotImplementedError

    def phases(self, t, offsets=None):
        """Phase data for the times ``t + offsets``, consumed by :meth:`apply_phases`.

        Computing it once lets the backward and forward exponentials of an
        averaged tendency share it. The default is just the times.
        """
        t = np.asarray(t, dtype=float)
        return t if offsets is None else t + np.asarray(offsets, dtype=float)

    def apply_phases(self, phases, U: np.ndarray, sign: int = 1) -> np.ndarray:
        return apply_blocks(self.exp_blocks(phases, sign), U)

    def apply_exp(self, t, U: np.ndarray, sign: int = 1) -> np.ndarray:
        """``exp(sign * t * L / eps) U``; an array of times maps onto a leading batch axis."""
        return self.apply_phases(self.phases(t), U, sign)

    def apply_L(self, U: np.ndarray) -> np.ndarray:
        return apply_blocks(self.L.blocks, U)

    def apply_Linv(self, U: np.ndarray) -> np.ndarray:
        return apply_blocks(self.Linv.blocks, U)

    def apply_LLinv(self, U: np.ndarray) -> np.ndarray:
        return apply_blocks(self.LLinv.blocks, U)

    def nonlinear(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dissipated_nonlinear(self, U: np.ndarray) -> np.ndarray:
        return self.nonlinear(U)

    has_classical_correction = False

    def classical_correction(self, W: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no closed-form classical mean correction")

    def initial_state(self) -> np.ndarray:
        raise NotImplementedError

    def physical(self, U: np.ndarray) -> np.ndarray:
        """Real-valued quantities the error metric compares."""
        return np.real(U)

    def describe(self) -> dict:
        return {"model": self.name, "eps": self.eps}


class TrigPhases:
    """Phase data as ``(cos, sin)`` tables of ``theta = t * rates``.

    For a scalar ``t`` with node offsets, angle addition against cached node
    tables replaces the per-call evaluation of cos and sin on the full
    ``(nodes, modes)`` grid.
    """

    rates: np.ndarray
    _OFFSET_CACHE_SIZE = 32

    def phases(self, t, offsets=None):
        t = np.asarray(t, dtype=float)
        if offsets is None:
            theta = np.multiply.outer(t, self.rates)
            return np.cos(theta), np.sin(theta)
        offsets = np.asarray(offsets, dtype=float)
        if t.ndim:
            return self.phases(np.add.outer(t, offsets))
        cs, ss = self._offset_table(offsets)
        theta = t * self.rates
        ct, st = np.cos(theta), np.sin(theta)
        return ct * cs - st * ss, st * cs + ct * ss

    def _offset_table(self, offsets: np.ndarray):
        cache = self.__dict__.setdefault("_offset_cache", {})
        key = (offsets.shape, offsets.tobytes())
        table = cache.get(key)
        if table is None:
            if len(cache) >= self._OFFSET_CACHE_SIZE:
                cache.clear()
            theta = np.multiply.outer(offsets, self.rates)
            table = (np.cos(theta), np.sin(theta))
            cache[key] = table
        return table
