"""Time-domain plane stress simulation of the layered phantom."""

from .integrate import Excitation, SimulationResult, SolverConfig, assemble, run, simulate, stable_time_step
from .materials import STANDOFF_PAD, VOIGT_POISSON, ElasticMaterial, SpongeSpec, elastic_section, voigt_section
from .mesh import (
    ABSORBER,
    GEL,
    GEL_LEVELS,
    PAD,
    REGION_NAMES,
    SPONGE,
    PhantomGeometry,
    PhantomModel,
    build_block,
    build_model,
)

__all__ = [
    "ABSORBER", "GEL", "GEL_LEVELS", "PAD", "REGION_NAMES", "SPONGE",
    "ElasticMaterial", "Excitation", "PhantomGeometry", "PhantomModel",
    "STANDOFF_PAD", "SimulationResult", "SolverConfig", "SpongeSpec", "VOIGT_POISSON",
    "assemble", "build_block", "build_model", "elastic_section", "run", "simulate",
    "stable_time_step", "voigt_section",
]
