from __future__ import annotations

import math
from dataclasses import dataclass

from ..dispersion import SPONGE, VoigtMaterial
from ..errors import DomainError

#: Poisson ratio assigned to Voigt regions, which are specified by shear parameters only.
VOIGT_POISSON = 0.499


@dataclass(frozen=True)
class ElasticMaterial:
    youngs_modulus: float
    poisson_ratio: float
    rho: float

    def __post_init__(self):
        if not (math.isfinite(self.youngs_modulus) and self.youngs_modulus > 0):
            raise DomainError(f"youngs_modulus must be > 0, got {self.youngs_modulus!r}")
        if not (0 <= self.poisson_ratio < 0.5):
            raise DomainError(f"poisson_ratio must lie in [0, 0.5), got {self.poisson_ratio!r}")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise DomainError(f"rho must be > 0, got {self.rho!r}")


#: Acoustic standoff pad.
STANDOFF_PAD = ElasticMaterial(youngs_modulus=36.7e3, poisson_ratio=0.499, rho=1000.0)


@dataclass(frozen=True)
class SpongeSpec:
    """Effective single-phase sponge.

    With ``use_effective_density`` the solver density is the solid density
    divided by ``1 + void_ratio``.
    """

    material: VoigtMaterial = SPONGE
    void_ratio: float = 0.7
    use_effective_density: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.void_ratio) and self.void_ratio >= 0):
            raise DomainError(f"void_ratio must be >= 0, got {self.void_ratio!r}")

    @property
    def density(self) -> float:
        if self.use_effective_density:
            return self.material.rho / (1.0 + self.void_ratio)
        return self.material.rho

    @property
    def solver_material(self) -> VoigtMaterial:
        return VoigtMaterial(self.material.mu1, self.material.mu2, self.density)


@dataclass(frozen=True)
class SectionProperties:
    """Per-element constants used by assembly.

    ``bulk`` is the in-plane (plane stress) bulk modulus E / (2 (1 - nu)),
    ``shear`` the elastic shear modulus, ``viscosity`` the deviatoric
    dashpot coefficient and ``mass_damping`` a mass-proportional damping
    rate [1/s].
    """

    bulk: float
    shear: float
    viscosity: float
    rho: float
    mass_damping: float = 0.0

    @property
    def youngs_modulus(self) -> float:
        # plane stress: K2 = E / (2 (1 - nu)), G = E / (2 (1 + nu))
        return 4.0 * self.bulk * self.shear / (self.bulk + self.shear)

    @property
    def p_speed(self) -> float:
        """Plane-stress longitudinal speed sqrt(E / (rho (1 - nu^2)))."""
        return math.sqrt((self.bulk + self.shear) / self.rho)

    @property
    def s_speed(self) -> float:
        return math.sqrt(self.shear / self.rho)


def elastic_section(mat: ElasticMaterial) -> SectionProperties:
    e, nu = mat.youngs_modulus, mat.poisson_ratio
    return SectionProperties(
        bulk=e / (2.0 * (1.0 - nu)),
        shear=e / (2.0 * (1.0 + nu)),
        viscosity=0.0,
        rho=mat.rho,
    )


def voigt_section(mat: VoigtMaterial, poisson_ratio: float = VOIGT_POISSON) -> SectionProperties:
    nu = poisson_ratio
    return SectionProperties(
        bulk=mat.mu1 * (1.0 + nu) / (1.0 - nu),
        shear=mat.mu1,
        viscosity=mat.mu2,
        rho=mat.rho,
    )
