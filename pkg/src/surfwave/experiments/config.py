"""Sweep configuration, loaded from and dumped to TOML.

Every key has a default matching the phantom study, so an empty file
reproduces the full gel-thickness by frequency sweep.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import tomli
import tomli_w

from ..dispersion import GEL, SPONGE, VoigtMaterial
from ..solver import (
    GEL_LEVELS,
    STANDOFF_PAD,
    ElasticMaterial,
    Excitation,
    PhantomGeometry,
    SolverConfig,
    SpongeSpec,
)


class ConfigError(ValueError):
    pass


@dataclass
class GeometrySection:
    pad_length: float = 0.09
    pad_height: float = 0.015
    sponge_length: float = 0.12
    sponge_height: float = 0.02
    element_size: float = 0.001
    absorber_width: float = 0.01
    clamp_width: float = 0.01

    def build(self, gel_thickness: float) -> PhantomGeometry:
        return PhantomGeometry(gel_thickness=gel_thickness, **dataclasses.asdict(self))


@dataclass
class PadSection:
    youngs_modulus: float = STANDOFF_PAD.youngs_modulus
    poisson_ratio: float = STANDOFF_PAD.poisson_ratio
    rho: float = STANDOFF_PAD.rho

    def build(self) -> ElasticMaterial:
        return ElasticMaterial(self.youngs_modulus, self.poisson_ratio, self.rho)


@dataclass
class GelSection:
    mu1: float = GEL.mu1
    mu2: float = GEL.mu2
    rho: float = GEL.rho

    def build(self) -> VoigtMaterial:
        return VoigtMaterial(self.mu1, self.mu2, self.rho)


@dataclass
class SpongeSection:
    mu1: float = SPONGE.mu1
    mu2: float = SPONGE.mu2
    rho: float = SPONGE.rho
    void_ratio: float = 0.7
    use_effective_density: bool = False

    def build(self) -> SpongeSpec:
        return SpongeSpec(VoigtMaterial(self.mu1, self.mu2, self.rho), self.void_ratio, self.use_effective_density)


@dataclass
class ExcitationSection:
    duration: float = 0.1
    amplitude: float = 1e-4
    contact_width: float = 0.003

    def build(self, frequency: float) -> Excitation:
        return Excitation(frequency, self.duration, self.amplitude, self.contact_width)


@dataclass
class SolverSection:
    cfl_factor: float = 0.5
    frame_interval: float = 1.0 / 2000.0
    record_count: int = 9
    record_spacing: float = 0.001
    #: negative means the sponge centre (TOML has no null)
    record_center: float = -1.0

    def build(self) -> SolverConfig:
        return SolverConfig(
            cfl_factor=self.cfl_factor,
            frame_interval=self.frame_interval,
            record_center=None if self.record_center < 0 else self.record_center,
            record_count=self.record_count,
            record_spacing=self.record_spacing,
        )


@dataclass
class AnalysisSection:
    speed_bound: float = 1.0
    pad_factor: int = 4
    min_k_points: int = 256
    #: method used for level comparisons and the dispersion plot
    primary_method: str = "phase_gradient"


@dataclass
class OutputSection:
    directory: str = "out"
    kspace_grids: bool = False


@dataclass
class SweepConfig:
    gel_levels: list = field(default_factory=lambda: list(GEL_LEVELS))
    frequencies: list = field(default_factory=lambda: [100.0, 150.0, 200.0, 250.0, 300.0])
    repetitions: int = 3
    #: additive displacement noise [m]; negative means 0.5% of the excitation amplitude
    noise_sigma: float = -1.0
    base_seed: int = 0
    workers: int = 1
    geometry: GeometrySection = field(default_factory=GeometrySection)
    pad: PadSection = field(default_factory=PadSection)
    gel: GelSection = field(default_factory=GelSection)
    sponge: SpongeSection = field(default_factory=SpongeSection)
    excitation: ExcitationSection = field(default_factory=ExcitationSection)
    solver: SolverSection = field(default_factory=SolverSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        if not self.gel_levels or not self.frequencies:
            raise ConfigError("gel_levels and frequencies must be non-empty")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if any(g < 0 for g in self.gel_levels):
            raise ConfigError("gel levels must be >= 0")
        if any(f <= 0 for f in self.frequencies):
            raise ConfigError("frequencies must be > 0")
        if self.analysis.primary_method not in ("kspace", "phase_gradient"):
            raise ConfigError(f"unknown primary_method {self.analysis.primary_method!r}")

    @property
    def sigma(self) -> float:
        if self.noise_sigma < 0:
            return 0.005 * self.excitation.amplitude
        return self.noise_sigma

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        return _from_dict(cls, data, "")

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())


def _from_dict(cls, data, where):
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where or 'top level'}]: {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = known[name].default_factory() if known[name].default_factory is not dataclasses.MISSING else known[name].default
        if dataclasses.is_dataclass(default):
            if not isinstance(value, dict):
                raise ConfigError(f"[{name}] must be a table")
            kwargs[name] = _from_dict(type(default), value, name)
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{name} must be true or false")
            kwargs[name] = value
        elif isinstance(default, int) and not isinstance(default, bool):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer")
            kwargs[name] = value
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{name} must be a number")
            kwargs[name] = float(value)
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(f"{name} must be an array")
            kwargs[name] = [float(v) for v in value]
        else:
            kwargs[name] = value
    return cls(**kwargs)


def load_config(path: Optional[Path] = None) -> SweepConfig:
    if path is None:
        return SweepConfig()
    with open(path, "rb") as fh:
        try:
            data = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return SweepConfig.from_dict(data)
