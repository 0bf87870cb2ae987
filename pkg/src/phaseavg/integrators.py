"""Explicit Runge-Kutta pipelines for the standard, modulation, phase-averaged
and mean-corrected formulations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from phaseavg.averaging import (
    NoCorrection,
    make_correction,
    mean_corrected_rhs,
    modvar_rhs,
    phase_averaged_rhs,
)
from phaseavg.kernel import DEFAULT_GAMMA, DEFAULT_K_MIN, DEFAULT_P, kernel_for
from phaseavg.models.base import ModelSystem

DEFAULT_C_TOL = 1e-10
DEFAULT_MAX_ITER = 100


class IntegrationError(RuntimeError):
    """The solution went non-finite, usually a step too large for the stiffness."""


class ConvergenceError(RuntimeError):
    """The fixed-point iteration for the initial modulation variable did not converge."""


@dataclass(frozen=True)
class ButcherTableau:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        M = len(b)
        if a.shape != (M, M) or c.shape != (M,):
            raise ValueError("inconsistent tableau shapes")
        if np.any(np.triu(a) != 0):
            raise ValueError("tableau is not explicit (a must be strictly lower triangular)")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError("weights b must sum to one")
        if np.max(np.abs(a.sum(axis=1) - c)) > 1e-14:
            raise ValueError("abscissae must equal the row sums of a")
        for name, arr in (("a", a), ("b", b), ("c", c)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def stages(self) -> int:
        return len(self.b)


RK4 = ButcherTableau(
    a=[[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]],
    b=[1 / 6, 1 / 3, 1 / 3, 1 / 6],
    c=[0, 0.5, 0.5, 1],
)


@dataclass
class Trajectory:
    """States sampled at ``times``; ``space`` is one of {"U", "V", "W"}."""

    times: np.ndarray
    states: np.ndarray
    space: str = "U"

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


Rhs = Callable[[np.ndarray, float], np.ndarray]


def rk_step(tableau: ButcherTableau, rhs: Rhs, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    k = []
    for i in range(tableau.stages):
        yi = y
        for j in range(i):
            if tableau.a[i, j] != 0:
                yi = yi + dt * tableau.a[i, j] * k[j]
        k.append(rhs(yi, t + tableau.c[i] * dt))
    out = y
    for i in range(tableau.stages):
        out = out + dt * tableau.b[i] * k[i]
    return out


def step_count(dt: float, T: float) -> int:
    """Number of whole steps of size ``dt`` that fit in ``[0, T]``."""
    if dt <= 0 or T < 0:
        raise ValueError(f"need dt > 0 and T >= 0, got dt={dt}, T={T}")
    ratio = T / dt
    n = round(ratio)
    return int(n) if abs(ratio - n) < 1e-9 * max(1.0, ratio) else int(math.floor(ratio))


def _check_finite(y: np.ndarray, t: float, dt: float, model: ModelSystem | None):
    if not np.all(np.isfinite(y)):
        msg = f"non-finite state at t={t:.6g} with dt={dt:.6g}"
        if model is not None:
            msg += f"; dt*omega_max/eps = {dt * model.omega_max / model.eps:.3g}"
        raise IntegrationError(msg)


def integrate(
    rhs: Rhs,
    y0: np.ndarray,
    dt: float,
    T: float,
    *,
    tableau: ButcherTableau = RK4,
    record_every: int = 1,
    space: str = "U",
    model: ModelSystem | None = None,
) -> Trajectory:
    """Fixed-step explicit RK over ``[0, T]``, storing every ``record_every``-th step."""
    n_steps = step_count(dt, T)
    y = np.array(y0, dtype=complex)
    times = [0.0]
    states = [y.copy()]
    for n in range(n_steps):
        y = rk_step(tableau, rhs, y, n * dt, dt)
        _check_finite(y, (n + 1) * dt, dt, model)
        if (n + 1) % record_every == 0:
            times.append((n + 1) * dt)
            states.append(y.copy())
    return Trajectory(np.array(times), np.array(states), space)


def integrate_standard(model: ModelSystem, U0, dt: float, T: float, **kw) -> Trajectory:
    """Reference RK on ``dU/dt = -L U / eps + N*(U)``; ``dt`` must resolve the fast waves."""
    inv_eps = 1.0 / model.eps

    def rhs(U, t):
        return model.dissipated_nonlinear(U) - inv_eps * model.apply_L(U)

    return integrate(rhs, U0, dt, T, space="U", model=model, **kw)


def integrate_modvar(model: ModelSystem, U0, dt: float, T: float, **kw) -> Trajectory:
    """RK on the unaveraged modulation equation with ``V(0) = U0``."""
    return integrate(lambda V, t: modvar_rhs(model, V, t), U0, dt, T, space="V", model=model, **kw)


def integrate_phase_averaged(
    model: ModelSystem,
    U0,
    dt: float,
    T: float,
    eta: float,
    *,
    gamma: float = DEFAULT_GAMMA,
    P: float = DEFAULT_P,
    K_min: int = DEFAULT_K_MIN,
    **kw,
) -> Trajectory:
    """RK on the phase-averaged modulation equation over window ``eta``."""
    kernel = kernel_for(eta, model.omega_max, model.eps, gamma, P, K_min)
    return integrate(
        lambda V, t: phase_averaged_rhs(model, V, t, kernel), U0, dt, T, space="V", model=model, **kw
    )


def back_transform(model: ModelSystem, W: np.ndarray, t: float, C: np.ndarray | None = None) -> np.ndarray:
    """``U = e^{-t L/eps} W + eps L^+ C``; without ``C`` this is the plain modulation map."""
    U = model.apply_exp(t, W, -1)
    if C is not None:
        U = U + model.eps * model.apply_Linv(C)
    return U


def forward_transform(model: ModelSystem, U: np.ndarray, t: float, C: np.ndarray | None = None) -> np.ndarray:
    """Inverse of :func:`back_transform`."""
    if C is not None:
        U = U - model.eps * model.apply_Linv(C)
    return model.apply_exp(t, U, 1)


def to_standard(model: ModelSystem, traj: Trajectory) -> Trajectory:
    """Back-transform a modulation-space trajectory (no mean correction)."""
    if traj.space == "U":
        return traj
    states = np.array([back_transform(model, W, t) for t, W in zip(traj.times, traj.states)])
    return Trajectory(traj.times, states, "U")


def init_mean_corrected(
    model: ModelSystem,
    U0,
    correction: Callable[[np.ndarray, float], np.ndarray],
    C_tol: float = DEFAULT_C_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Fixed-point solve of ``W0 = U0 - eps L^+ C(W0, 0)``.

    Returns ``(W0, C0, iterations)``; a correction independent of ``W``
    converges in one iteration.
    """
    if C_tol <= 0:
        raise ValueError("C_tol must be positive")
    U0 = np.asarray(U0, dtype=complex)
    eps = model.eps
    C0 = correction(U0, 0.0)
    W0 = U0 - eps * model.apply_Linv(C0)
    C_new = correction(W0, 0.0)
    iterations = 1
    while np.sum(np.abs(C0 - C_new)) > C_tol:
        if iterations >= max_iter:
            raise ConvergenceError(
                f"initial mean correction did not converge in {max_iter} iterations "
                f"(residual {np.sum(np.abs(C0 - C_new)):.3e})"
            )
        C0 = C_new
        W0 = U0 - eps * model.apply_Linv(C0)
        C_new = correction(W0, 0.0)
        iterations += 1
    return W0, C_new, iterations


def integrate_mean_corrected(
    model: ModelSystem,
    U0,
    dt: float,
    T: float,
    eta: float,
    strategy="local",
    *,
    eta_C: float | None = None,
    gamma: float = DEFAULT_GAMMA,
    P: float = DEFAULT_P,
    K_min: int = DEFAULT_K_MIN,
    C_tol: float = DEFAULT_C_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    tableau: ButcherTableau = RK4,
    record_every: int = 1,
) -> tuple[Trajectory, Trajectory]:
    """Mean-corrected phase averaging, returning the ``W`` and ``U`` trajectories.

    ``strategy`` is "none", "classical", "local" (window ``eta_C``), or any
    callable ``(W, t) -> C``. The correction is refreshed at every RK stage
    except the first, which reuses the end-of-step value of the previous step.
    """
    if callable(strategy):
        correction = strategy
    else:
        correction = make_correction(model, strategy, eta_C, gamma=gamma, P=P, K_min=K_min)
    kernel = kernel_for(eta, model.omega_max, model.eps, gamma, P, K_min)

    U0 = np.asarray(U0, dtype=complex)
    W, C_end, _ = init_mean_corrected(model, U0, correction, C_tol, max_iter)
    n_steps = step_count(dt, T)
    M = tableau.stages
    times, Ws, Us = [0.0], [W.copy()], [U0.copy()]
    for n in range(n_steps):
        t_n = n * dt
        f = []
        for i in range(M):
            Wi = W
            for j in range(i):
                if tableau.a[i, j] != 0:
                    Wi = Wi + dt * tableau.a[i, j] * f[j]
            ti = t_n + tableau.c[i] * dt
            Ci = C_end if i == 0 else correction(Wi, ti)
            f.append(mean_corrected_rhs(model, Wi, ti, kernel, Ci))
        for i in range(M):
            W = W + dt * tableau.b[i] * f[i]
        t_next = (n + 1) * dt
        _check_finite(W, t_next, dt, model)
        C_end = correction(W, t_next)
        if (n + 1) % record_every == 0:
            times.append(t_next)
            Ws.append(W.copy())
            Us.append(back_transform(model, W, t_next, C_end))
    times = np.array(times)
    return Trajectory(times, np.array(Ws), "W"), Trajectory(times, np.array(Us), "U")


__all__ = [
    "RK4",
    "ButcherTableau",
    "ConvergenceError",
    "IntegrationError",
    "NoCorrection",
    "Trajectory",
    "back_transform",
    "forward_transform",
    "init_mean_corrected",
    "integrate",
    "integrate_mean_corrected",
    "integrate_modvar",
    "integrate_phase_averaged",
    "integrate_standard",
    "rk_step",
    "step_count",
    "to_standard",
]
