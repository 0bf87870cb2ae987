"""Sweep configuration, validation and the built-in experiment presets."""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from phaseavg.integrators import DEFAULT_C_TOL, DEFAULT_MAX_ITER
from phaseavg.kernel import DEFAULT_GAMMA, DEFAULT_K_MIN, DEFAULT_P

log = logging.getLogger(__name__)

MODELS = ("spring", "kg", "rswe")
METHODS = ("phase_averaged", "mean_corrected_classical", "mean_corrected_local")
METHOD_ALIASES = {
    "pa": "phase_averaged",
    "mc-classical": "mean_corrected_classical",
    "mc-local": "mean_corrected_local",
}
PROCEDURES = ("zeta_sweep", "select_windows")
SLOW_EPS = 0.001


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    """One experiment: a model family, parameter values, timesteps and windows.

    ``eps`` lists the PDE timescale separations, ``rho`` the spring resonance
    factors. With ``eta_C = None`` the local method ties ``eta_C`` to ``eta``.
    """

    model: str = "spring"
    methods: list[str] = field(default_factory=lambda: ["phase_averaged"])
    eps: list[float] = field(default_factory=list)
    rho: list[float] = field(default_factory=list)
    dts: list[float] = field(default_factory=lambda: [0.5])
    T_max: float = 200.0
    procedure: str = "zeta_sweep"
    zeta_start: float = 0.1
    zeta_stop: float = 2.0
    dzeta: float = 0.1
    eta_C: float | None = None
    d_eta_C: float | None = None
    n_eta_C: int = 40
    ref_dt: float = 0.01
    gamma: float = DEFAULT_GAMMA
    P: float = DEFAULT_P
    K_min: int = DEFAULT_K_MIN
    C_tol: float = DEFAULT_C_TOL
    max_iter: int = DEFAULT_MAX_ITER
    N_x: int = 32
    mu: float = 1e-4
    include_slow: bool = False
    timing: bool = True
    out: str = "results"

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def params(self) -> list[tuple[float | None, float | None]]:
        """``(eps, rho)`` pairs to run, after the slow-cell gate."""
        if self.model == "spring":
            return [(None, r) for r in self.rho]
        kept = []
        for e in self.eps:
            if self.model == "rswe" and e <= SLOW_EPS and not self.include_slow:
                log.warning("skipping rswe eps=%g (enable include_slow to run it)", e)
                continue
            kept.append((e, None))
        return kept

    def zeta_grid(self) -> list[float]:
        n = int((self.zeta_stop - self.zeta_start) / self.dzeta + 1e-9) + 1
        return [round(self.zeta_start + i * self.dzeta, 12) for i in range(n)]

    def eta_C_grid(self, eps: float | None) -> list[float]:
        step = self.d_eta_C if self.d_eta_C is not None else (eps if eps is not None else 1.0)
        return [round(step * (i + 1), 12) for i in range(self.n_eta_C)]

    def record_every(self) -> int:
        """Reference sampling stride, in reference steps, shared by every coarse dt."""
        stride = 0
        for n in self.ref_ratios():
            stride = n if stride == 0 else _gcd(stride, n)
        return stride

    def ref_ratios(self) -> list[int]:
        ratios = []
        for dt in self.dts:
            r = Fraction(dt).limit_denominator(10**9) / Fraction(self.ref_dt).limit_denominator(10**9)
            if r.denominator != 1:
                raise ConfigError(f"reference dt {self.ref_dt} does not divide dt {dt}")
            ratios.append(int(r))
        return ratios

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        self.methods = [METHOD_ALIASES.get(m, m) for m in self.methods]
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")
        if not self.methods:
            raise ConfigError("no methods given")
        if self.procedure not in PROCEDURES:
            raise ConfigError(f"procedure must be one of {PROCEDURES}")
        if self.model == "spring":
            if not self.rho:
                raise ConfigError("spring runs need at least one rho")
        elif not self.eps:
            raise ConfigError(f"{self.model} runs need at least one eps")
        if any(not 0 < e <= 1 for e in self.eps):
            raise ConfigError("eps values must lie in (0, 1]")
        if "mean_corrected_classical" in self.methods and self.model == "rswe":
            raise ConfigError("rswe has no classical mean correction")
        if not self.dts or any(dt <= 0 for dt in self.dts):
            raise ConfigError("dts must be a non-empty list of positive steps")
        if self.dzeta <= 0:
            raise ConfigError("dzeta must be positive")
        if self.zeta_stop < self.zeta_start or self.zeta_start < 0:
            raise ConfigError("need 0 <= zeta_start <= zeta_stop")
        if self.procedure == "select_windows" and self.n_eta_C < 1:
            raise ConfigError("select_windows needs a non-empty eta_C grid")
        if self.ref_dt <= 0 or self.T_max <= 0:
            raise ConfigError("ref_dt and T_max must be positive")
        if self.C_tol <= 0:
            raise ConfigError("C_tol must be positive")
        self.ref_ratios()


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def preset(name: str) -> SweepConfig:
    """Configurations reproducing the spring, KG and RSWE error studies."""
    if name == "spring":
        cfg = SweepConfig(
            model="spring",
            methods=["phase_averaged", "mean_corrected_classical"],
            rho=[1.5, 1.7, 1.95, 2.0, 2.2, 2.5],
            dts=[0.5],
            T_max=200.0,
            zeta_start=0.1,
            zeta_stop=2.0,
            dzeta=0.1,
            ref_dt=0.01,
            out="results/spring",
        )
    elif name == "kg":
        cfg = SweepConfig(
            model="kg",
            methods=["phase_averaged", "mean_corrected_classical", "mean_corrected_local"],
            eps=[0.5, 0.1, 0.05],
            dts=[1.0, 2.0, 3.0],
            T_max=20.0,
            zeta_start=0.05,
            zeta_stop=2.0,
            dzeta=0.05,
            ref_dt=1e-4,
            out="results/kg",
        )
    elif name == "rswe":
        cfg = SweepConfig(
            model="rswe",
            methods=["phase_averaged", "mean_corrected_local"],
            procedure="select_windows",
            eps=[0.5, 0.1, 0.05, 0.01, 0.001],
            dts=[0.1, 0.2, 0.3],
            T_max=10.0,
            zeta_start=0.05,
            zeta_stop=2.0,
            dzeta=0.05,
            n_eta_C=40,
            ref_dt=1e-4,
            out="results/rswe",
        )
    else:
        raise ConfigError(f"unknown preset {name!r}; choose spring, kg or rswe")
    cfg.validate()
    return cfg
