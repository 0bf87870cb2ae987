from phaseavg.models.base import ModelSystem
from phaseavg.models.kg import KGModel, KGParams, kg_classical_correction
from phaseavg.models.rswe import RSWEModel, RSWEParams
from phaseavg.models.scalar import ConstantForcingModel
from phaseavg.models.spring import SpringModel, SpringParams
from phaseavg.numerics import GridSpec


def spring_model(params: SpringParams | None = None) -> SpringModel:
    return SpringModel(params)


def kg_model(params: KGParams | None = None, grid: GridSpec | None = None) -> KGModel:
    return KGModel(params, grid)


def rswe_model(params: RSWEParams | None = None, grid: GridSpec | None = None) -> RSWEModel:
    return RSWEModel(params, grid)


def make_model(name: str, *, eps: float | None = None, rho: float | None = None,
               N_x: int = 32, mu: float = 1e-4) -> ModelSystem:
    """Build a model by id; ``rho`` applies to the spring, ``eps`` to the PDEs."""
    if name == "spring":
        return SpringModel(SpringParams(rho=2.0 if rho is None else rho))
    if name == "kg":
        return KGModel(KGParams(eps=0.1 if eps is None else eps), GridSpec(N_x))
    if name == "rswe":
        return RSWEModel(RSWEParams(eps=0.1 if eps is None else eps, mu=mu), GridSpec(N_x))
    raise ValueError(f"unknown model {name!r}")


__all__ = [
    "ConstantForcingModel",
    "KGModel",
    "KGParams",
    "ModelSystem",
    "RSWEModel",
    "RSWEParams",
    "SpringModel",
    "SpringParams",
    "kg_classical_correction",
    "kg_model",
    "make_model",
    "rswe_model",
    "spring_model",
]
