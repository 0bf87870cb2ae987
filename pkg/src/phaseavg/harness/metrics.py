from __future__ import annotations

import numpy as np

from phaseavg.integrators import Trajectory
from phaseavg.numerics import dft_inverse

ERROR_KINDS = ("spring_l2", "kg_l1", "rswe_l2", "abs")


class TimeGridMismatch(ValueError):
    pass


def _physical(states: np.ndarray, kind: str) -> np.ndarray:
    if kind == "spring_l2":
        return np.real(states)
    if kind == "kg_l1":
        return np.real(dft_inverse(states[:, 0, :]))
    if kind == "rswe_l2":
        return np.real(dft_inverse(states))
    if kind == "abs":
        return states
    raise ValueError(f"unknown error kind {kind!r}; expected one of {ERROR_KINDS}")


def match_times(times: np.ndarray, ref_times: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Indices into ``ref_times`` for each entry of ``times``."""
    idx = np.searchsorted(ref_times, times - tol)
    idx = np.clip(idx, 0, len(ref_times) - 1)
    bad = np.abs(ref_times[idx] - times) > tol
    if np.any(bad):
        raise TimeGridMismatch(f"reference has no sample at t={times[bad][0]:.12g}")
    return idx


def error_metric(traj: Trajectory, ref: Trajectory, kind: str) -> float:
    """Mean over the samples ``t_n, n >= 1`` of the per-time difference norm.

    spring_l2: L2 over the three real positions. kg_l1: L1 over the physical
    ``a`` field. rswe_l2: L2 over all physical fields. abs: modulus (scalar tests).
    """
    if traj.space != "U" or ref.space != "U":
        raise ValueError("errors are measured in the standard (U) space")
    idx = match_times(traj.times, ref.times)
    sel = slice(1, None)
    diff = _physical(traj.states[sel], kind) - _physical(ref.states[idx[sel]], kind)
    flat = np.abs(diff).reshape(len(diff), -1)
    if len(flat) == 0:
        return 0.0
    if kind == "kg_l1":
        per_time = flat.sum(axis=1)
    else:
        per_time = np.sqrt(np.sum(flat * flat, axis=1))
    return float(per_time.mean())
