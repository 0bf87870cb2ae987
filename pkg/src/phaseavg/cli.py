"""Command-line driver for the window sweeps.

    phaseavg run CONFIG.json [--workers N] [--out DIR] [--dry-run] [--include-slow]
    phaseavg sweep --model kg --method pa --method mc-local --eps 0.1 --dt 1 2 3
    phaseavg preset rswe [--workers N] ...
    phaseavg trajectory --model spring --rho 1.7 --method mc-classical --dt 0.5 --eta 0.7 --out traj.npz
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from phaseavg.harness.config import METHOD_ALIASES, ConfigError, SweepConfig, preset
from phaseavg.harness.sweep import run_experiment
from phaseavg.integrators import integrate_mean_corrected, integrate_phase_averaged, to_standard
from phaseavg.models import make_model

log = logging.getLogger("phaseavg")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=1, help="process-pool size for sweep cells")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--dry-run", action="store_true", help="validate and print the resolved config only")
    p.add_argument("--include-slow", action="store_true", help="run the RSWE eps <= 0.001 cells")
    p.add_argument("--no-timing", action="store_true", help="write wall_ms = 0 for byte-stable CSVs")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phaseavg", description="Finite-window phase-averaging experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a JSON config file")
    run.add_argument("config")
    _common(run)

    pre = sub.add_parser("preset", help="run a built-in experiment")
    pre.add_argument("name", choices=["spring", "kg", "rswe"])
    _common(pre)

    sw = sub.add_parser("sweep", help="ad hoc sweep built from flags (defaults follow the model preset)")
    sw.add_argument("--model", required=True, choices=["spring", "kg", "rswe"])
    sw.add_argument("--method", action="append", choices=sorted(METHOD_ALIASES), help="repeatable")
    sw.add_argument("--eps", type=float, nargs="+")
    sw.add_argument("--rho", type=float, nargs="+")
    sw.add_argument("--dt", type=float, nargs="+")
    sw.add_argument("--T", type=float, dest="T_max")
    sw.add_argument("--zeta", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    sw.add_argument("--eta-C", type=float, help="fixed local window (default: tied to eta)")
    sw.add_argument("--select", action="store_true", help="two-step eta*/eta_C* window selection")
    sw.add_argument("--d-eta-C", type=float)
    sw.add_argument("--n-eta-C", type=int)
    sw.add_argument("--ref-dt", type=float)
    sw.add_argument("--N-x", type=int)
    sw.add_argument("--mu", type=float)
    _common(sw)

    tr = sub.add_parser("trajectory", help="save one run's W/V and U trajectories to .npz")
    tr.add_argument("--model", required=True, choices=["spring", "kg", "rswe"])
    tr.add_argument("--method", required=True, choices=sorted(METHOD_ALIASES))
    tr.add_argument("--eps", type=float)
    tr.add_argument("--rho", type=float)
    tr.add_argument("--dt", type=float, required=True)
    tr.add_argument("--T", type=float, dest="T_max", required=True)
    tr.add_argument("--eta", type=float, required=True)
    tr.add_argument("--eta-C", type=float)
    tr.add_argument("--N-x", type=int, default=32)
    tr.add_argument("--mu", type=float, default=1e-4)
    tr.add_argument("--out", required=True)
    tr.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_flags(args: argparse.Namespace) -> SweepConfig:
    cfg = preset(args.model)
    if args.method:
        cfg.methods = list(args.method)
    if args.eps is not None:
        cfg.eps = args.eps
    if args.rho is not None:
        cfg.rho = args.rho
    if args.dt is not None:
        cfg.dts = args.dt
    if args.zeta is not None:
        cfg.zeta_start, cfg.zeta_stop, cfg.dzeta = args.zeta
    cfg.procedure = "select_windows" if args.select else "zeta_sweep"
    for name in ("T_max", "eta_C", "d_eta_C", "n_eta_C", "ref_dt", "N_x", "mu"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _apply_common(cfg: SweepConfig, args: argparse.Namespace) -> SweepConfig:
    if args.out:
        cfg.out = args.out
    if args.include_slow:
        cfg.include_slow = True
    if args.no_timing:
        cfg.timing = False
    cfg.validate()
    return cfg


def _run(cfg: SweepConfig, args: argparse.Namespace) -> int:
    if args.dry_run:
        print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
        return 0
    paths = run_experiment(cfg, workers=args.workers)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    summary = json.loads(paths["summary"].read_text())
    for row in summary["best"]:
        param = f"rho={row['rho']}" if row["rho"] is not None else f"eps={row['eps']}"
        print(f"{row['method']:<26} {param:<10} dt={row['dt']:<5} zeta*={row['zeta']:<5} error={row['error']}")
    return 0


def _trajectory(args: argparse.Namespace) -> int:
    method = METHOD_ALIASES[args.method]
    model = make_model(args.model, eps=args.eps, rho=args.rho, N_x=args.N_x, mu=args.mu)
    U0 = model.initial_state()
    if method == "phase_averaged":
        mod = integrate_phase_averaged(model, U0, args.dt, args.T_max, args.eta)
        std = to_standard(model, mod)
    else:
        strategy = "classical" if method == "mean_corrected_classical" else "local"
        eta_C = args.eta_C if args.eta_C is not None else args.eta
        mod, std = integrate_mean_corrected(model, U0, args.dt, args.T_max, args.eta, strategy, eta_C=eta_C)
    np.savez(args.out, times=mod.times, modulation=mod.states, standard=std.states, space=mod.space)
    print(f"trajectory: {args.out} ({len(mod)} samples, {mod.space} and U)")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "trajectory":
            return _trajectory(args)
        if args.command == "run":
            cfg = SweepConfig.load(args.config)
        elif args.command == "preset":
            cfg = preset(args.name)
        else:
            cfg = config_from_flags(args)
        return _run(_apply_common(cfg, args), args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
