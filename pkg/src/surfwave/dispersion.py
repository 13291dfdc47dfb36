"""Kelvin-Voigt surface wave dispersion.

Forward model for the phase velocity of a surface wave on a Voigt solid,
the corresponding storage/loss moduli, and least-squares identification of
the shear elasticity and viscosity from speeds measured at several
frequencies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, DomainError, InsufficientDataError

#: Ratio of shear to surface (Rayleigh) wave speed for a near-incompressible solid.
RAYLEIGH_FACTOR = 1.05

#: Cellulose density, the default for fitting and simulation.
CELLULOSE_DENSITY = 1500.0

FIT_CSV_HEADER = ("mu1_pa", "mu2_pas", "rho_kgm3", "rms_residual_mps", "n_points")


def _check_positive(name, value):
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class VoigtMaterial:
    """Voigt solid: shear elasticity ``mu1`` [Pa], viscosity ``mu2`` [Pa s], density ``rho`` [kg/m^3]."""

    mu1: float
    mu2: float
    rho: float

    def __post_init__(self):
        _check_positive("mu1", self.mu1)
        _check_positive("rho", self.rho)
        if not math.isfinite(self.mu2) or self.mu2 < 0:
            raise DomainError(f"mu2 must be finite and >= 0, got {self.mu2!r}")


#: Sponge phantom parameters.
SPONGE = VoigtMaterial(mu1=6830.0, mu2=24.0, rho=CELLULOSE_DENSITY)
#: Transmission gel parameters; density assumed 1000 kg/m^3.
GEL = VoigtMaterial(mu1=1300.0, mu2=24.0, rho=1000.0)


@dataclass(frozen=True)
class DispersionPoint:
    frequency: float
    speed: float
    speed_sd: Optional[float] = None

    def __post_init__(self):
        _check_positive("frequency", self.frequency)
        _check_positive("speed", self.speed)
        if self.speed_sd is not None and not (self.speed_sd >= 0):
            raise DomainError(f"speed_sd must be >= 0, got {self.speed_sd!r}")


@dataclass(frozen=True)
class ViscoModuli:
    storage: float
    loss: float
    long_term: float


@dataclass(frozen=True)
class VoigtFit:
    material: VoigtMaterial
    rms_residual: float
    n_points: int


def _shear_speed(mu1, mu2, rho, frequency):
    # vectorised core; callers validate
    omega = 2.0 * np.pi * frequency
    mod2 = mu1 * mu1 + (omega * mu2) ** 2
    return np.sqrt(2.0 * mod2 / (rho * (mu1 + np.sqrt(mod2))))


def shear_wave_speed(mat: VoigtMaterial, frequency: float) -> float:
    """Phase velocity of a plane shear wave in a Voigt solid [m/s]."""
    _check_positive("frequency", frequency)
    return float(_shear_speed(mat.mu1, mat.mu2, mat.rho, frequency))


def surface_wave_speed(mat: VoigtMaterial, frequency: float) -> float:
    """Surface wave speed of a Voigt solid at ``frequency`` [Hz].

    The shear phase velocity scaled down by the Rayleigh factor 1.05.
    With ``mu2 == 0`` this is ``sqrt(mu1 / rho) / 1.05`` at every frequency.
    """
    return shear_wave_speed(mat, frequency) / RAYLEIGH_FACTOR


def voigt_moduli(mat: VoigtMaterial, frequency: float) -> ViscoModuli:
    _check_positive("frequency", frequency)
    return ViscoModuli(
        storage=mat.mu1,
        loss=2.0 * math.pi * frequency * mat.mu2,
        long_term=mat.mu1,
    )


def fit_objective(mu1, mu2, rho, frequencies, speeds):
    """Sum of squared speed residuals; broadcasts over array-valued ``mu1``/``mu2``."""
    f = np.asarray(frequencies, dtype=float)
    c = np.asarray(speeds, dtype=float)
    mu1 = np.asarray(mu1, dtype=float)[..., None]
    mu2 = np.asarray(mu2, dtype=float)[..., None]
    model = _shear_speed(mu1, mu2, rho, f) / RAYLEIGH_FACTOR
    return np.sum((model - c) ** 2, axis=-1)


# coarse search grid; mu2 includes the elastic limit
_GRID_MU1 = np.logspace(1.0, 6.0, 126)
_GRID_MU2 = np.concatenate(([0.0], np.logspace(-3.0, 3.0, 151)))
_N_STARTS = 4


def fit_voigt(
    points: Sequence[DispersionPoint],
    rho: float = CELLULOSE_DENSITY,
    *,
    rtol: float = 1e-10,
    max_restarts: int = 50,
) -> VoigtFit:
    """Identify Voigt ``mu1``, ``mu2`` from multi-frequency surface wave speeds.

    Unweighted least squares on speed. A log-spaced grid search picks the
    starting point, then Nelder-Mead is restarted from its own optimum until
    the objective stops improving by more than ``rtol`` (relative).

    Raises
    ------
    InsufficientDataError
        Fewer than two points, or fewer than two distinct frequencies.
    ConvergenceError
        ``max_restarts`` exhausted; ``err.best`` is the best ``VoigtFit``.
    """
    _check_positive("rho", rho)
    points = list(points)
    if len(points) < 2:
        raise InsufficientDataError(f"need at least 2 dispersion points, got {len(points)}")
    freqs = np.array([p.frequency for p in points])
    speeds = np.array([p.speed for p in points])
    if len(np.unique(freqs)) < 2:
        raise InsufficientDataError("need at least 2 distinct frequencies")

    grid = fit_objective(_GRID_MU1[:, None], _GRID_MU2[None, :], rho, freqs, speeds)

    omegas = [2.0 * math.pi * f for f in freqs]
    targets = [float(c) for c in speeds]

    # search in (ln mu1, sqrt(mu2)) so mu2 >= 0 needs no explicit bound
    def obj(p):
        mu1 = math.exp(p[0])
        mu2 = p[1] * p[1]
        total = 0.0
        for w, c in zip(omegas, targets):
            mod2 = mu1 * mu1 + (w * mu2) ** 2
            r = math.sqrt(2.0 * mod2 / (rho * (mu1 + mod2**0.5))) / RAYLEIGH_FACTOR - c
            total += r * r
        return total

    floor = 1e-28 * float(np.sum(speeds**2))
    best = None
    # the valley is long and curved when viscosity dominates, so polish
    # from several grid basins rather than only the lowest grid cell
    for i, j in _grid_minima(grid, _N_STARTS):
        x = np.array([math.log(_GRID_MU1[i]), math.sqrt(_GRID_MU2[j])])
        x, fx, converged = _polish(obj, x, rtol, floor, max_restarts)
        if best is None or fx < best[1]:
            best = (x, fx, converged)
    x, fx, converged = best
    if not converged:
        raise ConvergenceError(
            f"fit_voigt did not converge after {max_restarts} restarts",
            best=_make_fit(x, fx, rho, len(points)),
        )
    return _make_fit(x, fx, rho, len(points))


def _grid_minima(grid, count):
    """Indices of the ``count`` lowest local minima of ``grid`` (8-neighbour)."""
    padded = np.pad(grid, 1, constant_values=np.inf)
    n, m = grid.shape
    is_min = np.ones_like(grid, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= grid <= padded[1 + di:1 + di + n, 1 + dj:1 + dj + m]
    idx = np.argwhere(is_min)
    order = np.argsort(grid[is_min], kind="stable")
    return [tuple(idx[k]) for k in order[:count]]


def _polish(obj, x, rtol, floor, max_restarts):
    """Restarted Nelder-Mead; returns (x, f(x), converged)."""
    fx = obj(x)
    step = np.array([0.1, max(0.1 * x[1], 0.05)])
    for _ in range(max_restarts):
        simplex = np.array([x, x + [step[0], 0.0], x + [0.0, step[1]]])
        res = minimize(
            obj,
            x,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-11,
                "fatol": 0.1 * rtol * fx + floor,
                "maxiter": 4000,
            },
        )
        improvement = fx - res.fun
        if res.fun < fx:
            x, fx = res.x, float(res.fun)
        if improvement <= rtol * fx or fx <= floor:
            return x, fx, True
        step = np.maximum(np.abs(step) * 0.1, 1e-8)
    return x, fx, False


def _make_fit(x, fx, rho, n):
    mat = VoigtMaterial(mu1=math.exp(x[0]), mu2=float(x[1] * x[1]), rho=rho)
    return VoigtFit(material=mat, rms_residual=math.sqrt(fx / n), n_points=n)


def read_dispersion_csv(path) -> list[DispersionPoint]:
    """Read ``frequency_hz,speed_mps[,speed_sd_mps]`` rows."""
    points = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"frequency_hz", "speed_mps"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
        for row in reader:
            sd = row.get("speed_sd_mps")
            points.append(
                DispersionPoint(
                    frequency=float(row["frequency_hz"]),
                    speed=float(row["speed_mps"]),
                    speed_sd=float(sd) if sd not in (None, "") else None,
                )
            )
    return points


def write_dispersion_csv(path, points: Iterable[DispersionPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frequency_hz", "speed_mps", "speed_sd_mps"])
        for p in points:
            w.writerow([repr(p.frequency), repr(p.speed), "" if p.speed_sd is None else repr(p.speed_sd)])


def write_fit_csv(path, fit: VoigtFit) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIT_CSV_HEADER)
        m = fit.material
        w.writerow([repr(m.mu1), repr(m.mu2), repr(m.rho), repr(fit.rms_residual), fit.n_points])
