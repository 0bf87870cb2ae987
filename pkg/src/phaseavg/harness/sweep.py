"""Reference solutions, window sweeps and the two-step window selection."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from phaseavg.harness.config import SweepConfig
from phaseavg.harness.metrics import error_metric
from phaseavg.integrators import (
    ConvergenceError,
    IntegrationError,
    Trajectory,
    integrate_mean_corrected,
    integrate_modvar,
    integrate_phase_averaged,
    integrate_standard,
    to_standard,
)
from phaseavg.kernel import sample_count
from phaseavg.models import make_model

log = logging.getLogger(__name__)

CSV_HEADER = ["model", "method", "eps", "rho", "dt", "zeta", "eta", "eta_C", "K_s", "K_r", "error", "wall_ms", "status"]


@dataclass(frozen=True)
class Cell:
    model: str
    method: str
    eps: float | None
    rho: float | None
    dt: float
    zeta: float
    eta_C: float | None

    @property
    def eta(self) -> float:
        return round(self.zeta * self.dt, 12)


@dataclass
class ErrorReport:
    rows: list[dict] = field(default_factory=list)
    selections: list[dict] = field(default_factory=list)

    def sorted_rows(self) -> list[dict]:
        return sorted(self.rows, key=_row_key)

    def best(self) -> list[dict]:
        """Lowest-error row per (method, eps, rho, dt); ties go to the smaller window."""
        groups: dict[tuple, dict] = {}
        for row in self.sorted_rows():
            key = (row["method"], row["eps"], row["rho"], row["dt"])
            cur = groups.get(key)
            if cur is None or row["error"] < cur["error"]:
                groups[key] = row
        return [groups[k] for k in sorted(groups, key=lambda k: tuple(_sortable(v) for v in k))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.sorted_rows():
            writer.writerow([_fmt(row[c]) for c in CSV_HEADER])
        return buf.getvalue()


def _sortable(v):
    return (0, "") if v is None else (1, v)


def _row_key(row):
    return tuple(_sortable(row[c]) for c in ("model", "method", "eps", "rho", "dt", "zeta", "eta_C"))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


# reference cache -----------------------------------------------------------

_REF_CACHE: dict[str, Trajectory] = {}
_REF_LOCK = threading.Lock()


def reference_key(cfg: SweepConfig, eps, rho) -> str:
    payload = {
        "model": cfg.model,
        "eps": eps,
        "rho": rho,
        "T_max": cfg.T_max,
        "ref_dt": cfg.ref_dt,
        "stride": cfg.record_every(),
        "N_x": cfg.N_x,
        "mu": cfg.mu if cfg.model == "rswe" else None,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def compute_reference(cfg: SweepConfig, eps, rho) -> Trajectory:
    """Fine-step RK4 reference: the standard equation for the spring, the
    unaveraged modulation equation for the PDEs."""
    model = make_model(cfg.model, eps=eps, rho=rho, N_x=cfg.N_x, mu=cfg.mu)
    U0 = model.initial_state()
    stride = cfg.record_every()
    if cfg.model == "spring":
        return integrate_standard(model, U0, cfg.ref_dt, cfg.T_max, record_every=stride)
    traj = integrate_modvar(model, U0, cfg.ref_dt, cfg.T_max, record_every=stride)
    return to_standard(model, traj)


def get_reference(cfg: SweepConfig, eps, rho) -> Trajectory:
    key = reference_key(cfg, eps, rho)
    with _REF_LOCK:
        if key not in _REF_CACHE:
            t0 = time.perf_counter()
            _REF_CACHE[key] = compute_reference(cfg, eps, rho)
            log.info("reference %s eps=%s rho=%s built in %.1fs", cfg.model, eps, rho, time.perf_counter() - t0)
        return _REF_CACHE[key]


def clear_reference_cache() -> None:
    with _REF_LOCK:
        _REF_CACHE.clear()


# cells ---------------------------------------------------------------------

def run_cell(cfg: SweepConfig, cell: Cell, ref: Trajectory) -> dict:
    """Integrate one (method, parameter, dt, window) combination and score it."""
    model = make_model(cfg.model, eps=cell.eps, rho=cell.rho, N_x=cfg.N_x, mu=cfg.mu)
    kern = dict(gamma=cfg.gamma, P=cfg.P, K_min=cfg.K_min)
    eta = cell.eta
    K_s = sample_count(eta, model.omega_max, model.eps, cfg.P, cfg.K_min)
    U0 = model.initial_state()
    t0 = time.perf_counter()
    # blow-up at oversized steps is an expected outcome, reported as a failed cell
    with np.errstate(all="ignore"):
        error, status, eta_C, K_r = _integrate_cell(cfg, cell, model, U0, ref, eta, kern)
    wall_ms = round((time.perf_counter() - t0) * 1e3, 3) if cfg.timing else 0.0
    return {
        "model": cfg.model,
        "method": cell.method,
        "eps": cell.eps,
        "rho": cell.rho,
        "dt": cell.dt,
        "zeta": cell.zeta,
        "eta": eta,
        "eta_C": eta_C,
        "K_s": K_s,
        "K_r": K_r,
        "error": error,
        "wall_ms": wall_ms,
        "status": status,
    }


def _integrate_cell(cfg, cell, model, U0, ref, eta, kern):
    status = "ok"
    eta_C = K_r = None
    try:
        if cell.method == "phase_averaged":
            traj = to_standard(model, integrate_phase_averaged(model, U0, cell.dt, cfg.T_max, eta, **kern))
        elif cell.method == "mean_corrected_classical":
            _, traj = integrate_mean_corrected(
                model, U0, cell.dt, cfg.T_max, eta, "classical", C_tol=cfg.C_tol, max_iter=cfg.max_iter, **kern
            )
        else:
            eta_C = cell.eta_C if cell.eta_C is not None else eta
            K_r = sample_count(eta_C, model.omega_max, model.eps, cfg.P, cfg.K_min)
            _, traj = integrate_mean_corrected(
                model, U0, cell.dt, cfg.T_max, eta, "local", eta_C=eta_C,
                C_tol=cfg.C_tol, max_iter=cfg.max_iter, **kern,
            )
        error = error_metric(traj, ref, model.error_kind)
        if not math.isfinite(error):
            error, status = math.inf, "failed"
    except (IntegrationError, ConvergenceError, FloatingPointError, OverflowError) as exc:
        log.debug("cell %s failed: %s", cell, exc)
        error, status = math.inf, "failed"
    return error, status, eta_C, K_r


_WORKER_STATE: dict = {}


def _worker_init(cfg_dict, refs):
    _WORKER_STATE["cfg"] = SweepConfig.from_dict(cfg_dict)
    _WORKER_STATE["refs"] = refs


def _worker_run(cell: Cell) -> dict:
    cfg = _WORKER_STATE["cfg"]
    ref = _WORKER_STATE["refs"][(cell.eps, cell.rho)]
    return run_cell(cfg, cell, ref)


def run_cells(cfg: SweepConfig, cells: list[Cell], workers: int = 1) -> list[dict]:
    """Evaluate independent cells, serially or in a process pool; output order follows ``cells``."""
    refs = {}
    for c in cells:
        if (c.eps, c.rho) not in refs:
            refs[(c.eps, c.rho)] = get_reference(cfg, c.eps, c.rho)
    if workers <= 1 or len(cells) <= 1:
        return [run_cell(cfg, c, refs[(c.eps, c.rho)]) for c in cells]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_worker_init, initargs=(cfg.to_dict(), refs)
    ) as pool:
        return list(pool.map(_worker_run, cells, chunksize=max(1, len(cells) // (4 * workers))))


# sweeps --------------------------------------------------------------------

def zeta_sweep(cfg: SweepConfig, workers: int = 1, methods: list[str] | None = None) -> ErrorReport:
    """Error against normalized window ``zeta = eta / dt`` for every configured method."""
    cells = [
        Cell(cfg.model, method, eps, rho, dt, zeta, cfg.eta_C if method == "mean_corrected_local" else None)
        for method in (methods or cfg.methods)
        for eps, rho in cfg.params()
        for dt in cfg.dts
        for zeta in cfg.zeta_grid()
    ]
    return ErrorReport(run_cells(cfg, cells, workers))


def _argmin_smallest(rows: list[dict], key: str) -> dict:
    """Lowest error; ties broken toward the smaller window ``key``."""
    return min(rows, key=lambda r: (r["error"], r[key]))


def select_windows(cfg: SweepConfig, workers: int = 1) -> ErrorReport:
    """Two-step window choice per (parameter, dt).

    First the phase-averaged zeta sweep fixes ``eta*``; then, holding
    ``eta*``, the local mean-corrected method is swept over the ``eta_C``
    grid to find ``eta_C*``.
    """
    if not cfg.zeta_grid() or cfg.n_eta_C < 1:
        raise ValueError("select_windows needs non-empty zeta and eta_C grids")
    report = zeta_sweep(cfg, workers, methods=["phase_averaged"])
    pa_best = {}
    for row in report.rows:
        key = (row["eps"], row["rho"], row["dt"])
        pa_best.setdefault(key, []).append(row)
    cells = []
    for (eps, rho, dt), rows in pa_best.items():
        best = _argmin_smallest(rows, "zeta")
        pa_best[(eps, rho, dt)] = best
        for eta_C in cfg.eta_C_grid(eps):
            cells.append(Cell(cfg.model, "mean_corrected_local", eps, rho, dt, best["zeta"], eta_C))
    mc_rows = run_cells(cfg, cells, workers)
    report.rows.extend(mc_rows)
    for (eps, rho, dt), best in sorted(pa_best.items(), key=lambda kv: tuple(_sortable(v) for v in kv[0])):
        rows = [r for r in mc_rows if (r["eps"], r["rho"], r["dt"]) == (eps, rho, dt)]
        mc = _argmin_smallest(rows, "eta_C")
        report.selections.append(
            {
                "model": cfg.model,
                "eps": eps,
                "rho": rho,
                "dt": dt,
                "zeta_star": best["zeta"],
                "eta_star": best["eta"],
                "eta_C_star": mc["eta_C"],
                "error_phase_averaged": best["error"],
                "error_mean_corrected_local": mc["error"],
            }
        )
    return report


def run_experiment(cfg: SweepConfig, workers: int = 1, out: str | Path | None = None, dry_run: bool = False) -> dict:
    """Run the configured procedure and write ``errors.csv``, ``config.json`` and ``summary.json``.

    Returns a dict of written paths (empty for a dry run).
    """
    cfg.validate()
    if dry_run:
        return {}
    out_dir = Path(out if out is not None else cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.procedure == "select_windows":
        report = select_windows(cfg, workers)
        others = [m for m in cfg.methods if m not in ("phase_averaged", "mean_corrected_local")]
        if others:
            report.rows.extend(zeta_sweep(cfg, workers, methods=others).rows)
    else:
        report = zeta_sweep(cfg, workers)
    paths = {
        "errors": out_dir / "errors.csv",
        "config": out_dir / "config.json",
        "summary": out_dir / "summary.json",
    }
    paths["errors"].write_text(report.to_csv())
    cfg.dump(paths["config"])
    summary = {"best": [_jsonable(r) for r in report.best()], "selections": [_jsonable(s) for s in report.selections]}
    paths["summary"].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return paths


def _jsonable(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if k == "wall_ms":
            continue
        out[k] = "inf" if isinstance(v, float) and math.isinf(v) else v
    return out
