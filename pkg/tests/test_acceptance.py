"""Acceptance suite: one test per criterion, each run at its stated tolerance.

The end-of-run summary prints a PASS/FAIL line per criterion. Criteria 5, 7
and 8 run the full desk-scale experiments and dominate the suite's runtime.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from phaseavg.averaging import local_mean_correction, make_correction
from phaseavg.harness.config import SweepConfig, preset
from phaseavg.harness.sweep import clear_reference_cache, run_experiment, select_windows, zeta_sweep
from phaseavg.integrators import (
    init_mean_corrected,
    integrate_mean_corrected,
    integrate_modvar,
    integrate_phase_averaged,
    integrate_standard,
    to_standard,
)
from phaseavg.kernel import build_kernel, kernel_for
from phaseavg.models import ConstantForcingModel, KGModel, KGParams, RSWEModel, SpringModel, SpringParams, make_model
from phaseavg.models.rswe import rswe_blocks
from phaseavg.numerics import conjugate_symmetry_defect, dft_forward


def best_error(rows, method, **match):
    sel = [r for r in rows if r["method"] == method and all(r[k] == v for k, v in match.items())]
    return min(r["error"] for r in sel)


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion("1 scalar exactness oracle")
def test_scalar_exactness(verdict):
    omega, eps, c, u0, dt, T = 1.0, 0.1, 1.0, 1.0, 0.5, 10.0
    t0 = time.perf_counter()
    m = ConstantForcingModel(omega, eps, c, u0)

    def exact(t):
        shift = 1j * c * eps / omega
        return (u0 + shift) * np.exp(-1j * omega * t / eps) - shift

    _, mc = integrate_mean_corrected(m, m.initial_state(), dt, T, 1.0, "local", eta_C=1.0)
    mc_err = np.max(np.abs(mc.states[:, 0, 0] - exact(mc.times)))

    eta = 1.0
    chi = kernel_for(eta, omega, eps).oscillation_factor(omega, eps)
    pa = to_standard(m, integrate_phase_averaged(m, m.initial_state(), dt, T, eta))
    t = pa.times
    err = exact(t) - pa.states[:, 0, 0]
    closed = (1 - chi) * (1j * c * eps / omega) * (np.exp(-1j * omega * t / eps) - 1)
    # RK defect: composite Simpson versus the exact integral of the averaged tendency
    f = lambda s: chi * c * np.exp(1j * omega * s / eps)  # noqa: E731
    simpson = np.concatenate([[0], np.cumsum([dt / 6 * (f(s) + 4 * f(s + dt / 2) + f(s + dt)) for s in t[:-1]])])
    integral = chi * c * eps / (1j * omega) * (np.exp(1j * omega * t / eps) - 1)
    defect = np.abs(simpson - integral)
    pa_ok = bool(np.all(np.abs(err - closed) <= 1e-6 + defect))
    runtime = time.perf_counter() - t0

    ok = mc_err <= 1e-10 and pa_ok and runtime < 1.0
    verdict(ok, f"mean-corrected max error {mc_err:.1e} (<= 1e-10); phase-averaged closed form within "
                f"1e-6 + RK defect: {pa_ok}; {runtime:.2f}s")
    assert ok


# 2 -------------------------------------------------------------------------

@pytest.mark.criterion("2 matrix exponential oracles")
def test_matrix_exponentials(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = {}
    for m in (SpringModel(SpringParams(rho=1.7)), KGModel(KGParams(eps=0.1)), RSWEModel()):
        L = m.L.blocks
        dev = 0.0
        for _ in range(100):
            t = rng.uniform(-5.0, 5.0)
            j = rng.integers(L.shape[0])
            dev = max(dev, np.max(np.abs(m.exp_blocks(t)[j] - expm(t * L[j] / m.eps))))
        worst[m.name] = dev
    runtime = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-10 and runtime < 1.0
    verdict(ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f" (<= 1e-10); {runtime:.2f}s")
    assert ok


# 3 -------------------------------------------------------------------------

def long_window_mean(model, W, T, n):
    total = np.zeros(W.shape, dtype=complex)
    for ts in np.array_split(np.arange(n) * (T / n), max(1, n // 4096)):
        total += model.nonlinear(model.apply_exp(ts, W, -1)).sum(axis=0)
    return total / n


@pytest.mark.criterion("3 classical-correction oracles")
def test_classical_corrections(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    spring = SpringModel(SpringParams(rho=1.7))
    kg = KGModel(KGParams(eps=0.1))
    rel = {}
    mono = {}
    for model, n_samples in ((spring, 100_000), (kg, 140_000)):
        slow_period = 2 * np.pi * model.eps / np.min(np.abs(model.L.blocks[model.L.blocks != 0]))
        worst = 0.0
        for _ in range(3):
            if model is spring:
                W = rng.standard_normal((3, 1)) + 1j * rng.standard_normal((3, 1))
            else:
                W = dft_forward(rng.standard_normal((2, 32)))
            C = model.classical_correction(W)
            oracle = long_window_mean(model, W, 1000 * slow_period, n_samples)
            worst = max(worst, np.linalg.norm(C - oracle) / np.linalg.norm(C))
        rel[model.name] = worst
        devs = [
            np.linalg.norm(local_mean_correction(model, W, 0.0, kernel_for(n * slow_period, model.omega_max, model.eps)).C - C)
            for n in (10, 100, 1000)
        ]
        mono[model.name] = devs
    runtime = time.perf_counter() - t0
    monotone = all(d[0] > d[1] > d[2] for d in mono.values())
    ok = max(rel.values()) <= 1e-2 and monotone and runtime < 30
    verdict(ok, f"relative deviation spring {rel['spring']:.1e}, kg {rel['kg']:.1e} (<= 1e-2); local C deviations "
                + "; ".join(f"{k} " + " > ".join(f"{d:.1e}" for d in v) for k, v in mono.items())
                + f"; {runtime:.1f}s")
    assert ok


# 4 -------------------------------------------------------------------------

@pytest.mark.criterion("4 RSWE pseudoinverse")
def test_rswe_pseudoinverse(verdict):
    m = RSWEModel()
    L, Lp = m.L.blocks, m.Linv.blocks
    ax1 = max(np.max(np.abs(L[j] @ Lp[j] @ L[j] - L[j])) for j in range(m.n_modes))
    ax2 = max(np.max(np.abs(Lp[j] @ L[j] @ Lp[j] - Lp[j])) for j in range(m.n_modes))
    exact = True
    for k in (0, 1, 2):
        psi2 = 1 + k * k
        Lp_k = np.array([[0, 1, -1j * k], [-1, 0, 0], [-1j * k, 0, 0]]) / psi2
        LLp_k = np.array([[psi2, 0, 0], [0, 1, -1j * k], [0, 1j * k, k * k]]) / psi2
        _, got_Lp, got_LLp = rswe_blocks(np.array([k]))
        exact &= bool(np.array_equal(got_Lp[0], Lp_k) and np.array_equal(got_LLp[0], LLp_k))
    ok = ax1 <= 1e-12 and ax2 <= 1e-12 and exact
    verdict(ok, f"L L+ L = L to {ax1:.1e}, L+ L L+ = L+ to {ax2:.1e}; closed-form entries exact at k=0,1,2: {exact}")
    assert ok


# 5, 6 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def spring_report():
    cfg = preset("spring")
    t0 = time.perf_counter()
    rep = zeta_sweep(cfg)
    return cfg, rep, time.perf_counter() - t0


@pytest.mark.criterion("5 spring experiment")
def test_spring_experiment(verdict, spring_report):
    cfg, rep, runtime = spring_report
    lines, ok = [], True
    for rho in cfg.rho:
        pa = best_error(rep.rows, "phase_averaged", rho=rho)
        mc = best_error(rep.rows, "mean_corrected_classical", rho=rho)
        ok &= mc < pa
        lines.append(f"rho={rho}: {mc:.4f}<{pa:.4f}")
    ok = ok and runtime < 600
    verdict(ok, "mean-corrected < phase-averaged at best zeta; " + ", ".join(lines) + f"; {runtime:.0f}s")
    assert ok


@pytest.mark.criterion("6 peddle-plot shape")
def test_peddle_shape(verdict, spring_report):
    _, rep, _ = spring_report
    parts, ok = [], True
    for method in ("phase_averaged", "mean_corrected_classical"):
        rows = sorted((r for r in rep.rows if r["method"] == method and r["rho"] == 1.7), key=lambda r: r["zeta"])
        errs = [r["error"] for r in rows]
        interior = min(errs) < errs[0] and min(errs) < errs[-1]
        ok &= interior
        best = rows[int(np.argmin(errs))]["zeta"]
        parts.append(f"{method} min {min(errs):.4f} at zeta={best} (ends {errs[0]:.4f}, {errs[-1]:.4f})")
    verdict(ok, "rho=1.7 interior minimum; " + "; ".join(parts))
    assert ok


# 7 -------------------------------------------------------------------------

@pytest.mark.criterion("7 KG experiment")
def test_kg_experiment(verdict):
    cfg = preset("kg")
    t0 = time.perf_counter()
    rep = zeta_sweep(cfg)
    runtime = time.perf_counter() - t0
    clear_reference_cache()
    ok, parts = True, []
    for eps in cfg.eps:
        for dt in cfg.dts:
            pa = best_error(rep.rows, "phase_averaged", eps=eps, dt=dt)
            cl = best_error(rep.rows, "mean_corrected_classical", eps=eps, dt=dt)
            lo = best_error(rep.rows, "mean_corrected_local", eps=eps, dt=dt)
            cell_ok = cl < pa and lo < pa
            if eps in (0.1, 0.05):
                cell_ok &= lo <= cl
            ok &= cell_ok
            parts.append(f"eps={eps} dt={dt}: pa {pa:.2e} cl {cl:.2e} lo {lo:.2e}{'' if cell_ok else ' X'}")
    ok = ok and runtime < 1200
    verdict(ok, "both mean-corrected < phase-averaged; local <= classical at eps 0.1, 0.05; "
                + "; ".join(parts) + f"; {runtime:.0f}s")
    assert ok


# 8 -------------------------------------------------------------------------

@pytest.mark.criterion("8 RSWE experiment")
def test_rswe_experiment(verdict):
    cfg = preset("rswe")
    cfg.eps = [0.1, 0.05, 0.01]
    t0 = time.perf_counter()
    rep = select_windows(cfg)
    runtime = time.perf_counter() - t0
    clear_reference_cache()
    sel = {(s["eps"], s["dt"]): s for s in rep.selections}
    ok, parts = True, []
    for (eps, dt), s in sorted(sel.items()):
        better = s["error_mean_corrected_local"] <= s["error_phase_averaged"]
        ok &= better
        parts.append(f"eps={eps} dt={dt}: pa {s['error_phase_averaged']:.2e} lo {s['error_mean_corrected_local']:.2e} "
                     f"eta_C*={s['eta_C_star']}{'' if better else ' X'}")
    trend = all(
        sel[(0.01, dt)]["eta_C_star"] < sel[(0.05, dt)]["eta_C_star"] < sel[(0.1, dt)]["eta_C_star"]
        for dt in cfg.dts
    )
    ok = ok and trend and runtime < 1800
    verdict(ok, f"local <= phase-averaged at selected windows; eta_C* decreasing with eps: {trend}; "
                + "; ".join(parts) + f"; {runtime:.0f}s")
    assert ok


# 9 -------------------------------------------------------------------------

@settings(max_examples=100, deadline=None, database=None)
@given(eta=st.floats(min_value=1e-6, max_value=20.0), K=st.integers(min_value=1, max_value=300))
def kernel_properties(eta, K):
    k = build_kernel(eta, 4.0, K)
    assert abs(k.weights.sum() - 1.0) < 1e-12
    assert np.array_equal(k.nodes, -k.nodes[::-1]) and np.array_equal(k.weights, k.weights[::-1])


@pytest.mark.criterion("9 property suite")
def test_property_suite(verdict, tmp_path):
    t0 = time.perf_counter()
    checks = {}

    kernel_properties()
    checks["kernel normalization/symmetry"] = True

    kg = make_model("kg", eps=0.1)
    U0 = kg.initial_state()
    pa0 = integrate_phase_averaged(kg, U0, 0.5, 5.0, 0.0)
    mv = integrate_modvar(kg, U0, 0.5, 5.0)
    checks["eta=0 degeneracy"] = bool(np.array_equal(pa0.states, mv.states))

    same = True
    for name in ("spring", "kg", "rswe"):
        m = make_model(name, eps=0.1, rho=1.7)
        W, _ = integrate_mean_corrected(m, m.initial_state(), 0.1, 2.0, 0.2, "none")
        same &= bool(np.array_equal(W.states, integrate_phase_averaged(m, m.initial_state(), 0.1, 2.0, 0.2).states))
    checks["C=0 degeneracy"] = same

    defect = 0.0
    for name in ("kg", "rswe"):
        m = make_model(name, eps=0.1)
        _, U = integrate_mean_corrected(m, m.initial_state(), 0.1, 2.0, 0.2, "local", eta_C=0.2)
        defect = max(defect, max(conjugate_symmetry_defect(s) for s in U.states))
    checks["conjugate symmetry"] = defect < 1e-12

    spring = SpringModel(SpringParams(rho=1.7))
    finals = [integrate_standard(spring, spring.initial_state(), h, 4.0).final for h in (0.04, 0.02, 0.01)]
    slope = math.log2(np.linalg.norm(finals[0] - finals[1]) / np.linalg.norm(finals[1] - finals[2]))
    checks[f"RK4 slope {slope:.2f}"] = abs(slope - 4) <= 0.3

    iters = {}
    for name, strategies in (("spring", ("classical", "local")), ("kg", ("classical", "local")), ("rswe", ("local",))):
        m = make_model(name, eps=0.1, rho=1.7)
        for strategy in strategies:
            corr = make_correction(m, strategy, eta_C=1.0 if name == "spring" else 0.2)
            iters[f"{name}/{strategy}"] = init_mean_corrected(m, m.initial_state(), corr, C_tol=1e-10)[2]
    checks[f"fixed point iterations max {max(iters.values())}"] = max(iters.values()) <= 20

    cfg = SweepConfig.from_dict(dict(model="kg", methods=["pa", "mc-classical", "mc-local"], eps=[0.5], dts=[1.0],
                                     T_max=3.0, zeta_start=0.5, zeta_stop=1.5, dzeta=0.5, ref_dt=0.01, timing=False))
    outs = [run_experiment(cfg, workers=w, out=tmp_path / f"w{w}")["errors"].read_bytes() for w in (1, 2, 1)]
    checks["bit-identical reruns (1, 2, 1 workers)"] = outs[0] == outs[1] == outs[2]

    runtime = time.perf_counter() - t0
    ok = all(checks.values()) and runtime < 60
    verdict(ok, "; ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()) + f"; {runtime:.1f}s")
    assert ok
