"""Surface wave speed estimation from displacement records.

Two independent estimators:

* phase gradient -- phase of the excitation-frequency component at each
  position, regressed on distance;
* k-space peak -- magnitude of the 2D Fourier transform over (x, t), peak
  wavenumber at the excitation frequency, speed = f_p / k_p.

Wavenumbers K are in cycles per metre. K is signed so that a wave
travelling toward +x puts its F > 0 energy at K > 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .errors import (
    AliasingError,
    DegenerateSlopeError,
    PreconditionError,
    UnreliablePeakError,
)
from .record import WavefieldRecord

PHASE_GRADIENT = "phase_gradient"
KSPACE = "kspace"


@dataclass(frozen=True)
class SpeedEstimate:
    speed: float
    method: str
    ci_halfwidth: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class KSpaceMap:
    """``magnitude[i, j]`` is |U(k_axis[i], f_axis[j])|."""

    k_axis: np.ndarray
    f_axis: np.ndarray
    magnitude: np.ndarray

    @property
    def dk(self) -> float:
        return float(self.k_axis[1] - self.k_axis[0])

    @property
    def df(self) -> float:
        return float(self.f_axis[1] - self.f_axis[0])


def whole_period_frames(n_frames, frame_interval, frequency, tol=1e-6):
    """Largest frame count <= ``n_frames`` spanning an integer number of periods."""
    cycles_per_frame = frequency * frame_interval
    for n in range(n_frames, 0, -1):
        c = n * cycles_per_frame
        if c >= 1 and abs(c - round(c)) < tol:
            return n
    return n_frames


def phase_profile(record: WavefieldRecord, frequency: float) -> np.ndarray:
    """Complex amplitude of each channel at ``frequency``.

    Single-bin projection over the trailing whole-period block of frames,
    which removes leakage when the frequency is off the FFT grid.
    """
    n = whole_period_frames(record.n_frames, record.frame_interval, frequency)
    seg = record.samples[:, record.n_frames - n:]
    t = (np.arange(n) + record.n_frames - n) * record.frame_interval
    basis = np.exp(-2j * np.pi * frequency * t)
    return seg @ basis * (2.0 / n)


def phase_delay_speed(
    record: WavefieldRecord,
    frequency: float,
    *,
    speed_bound: float = 1.0,
    confidence: float = 0.95,
) -> SpeedEstimate:
    """Speed from the slope of unwrapped phase versus position.

    ``speed_bound`` is the slowest speed the caller expects; the position
    spacing must resolve half of the corresponding wavelength.
    """
    x = record.positions
    if x.size < 3:
        raise PreconditionError(f"phase gradient needs >= 3 positions, got {x.size}")
    dx = record.spacing
    if not frequency > 0:
        raise PreconditionError("frequency must be > 0")
    min_wavelength = speed_bound / frequency
    if dx >= min_wavelength / 2.0:
        raise PreconditionError(
            f"spacing {dx:g} m does not resolve half a wavelength ({min_wavelength / 2:g} m) at {speed_bound} m/s"
        )
    amp = phase_profile(record, frequency)
    if not np.any(np.abs(amp) > 0):
        raise DegenerateSlopeError("no signal at the excitation frequency")
    phase = np.unwrap(np.angle(amp))
    steps = np.diff(phase)
    if np.any(np.abs(steps) > 0.95 * np.pi):
        raise AliasingError(f"adjacent phase step {np.abs(steps).max():.3f} rad is ambiguous")

    fit = stats.linregress(x, phase)
    slope = float(fit.slope)
    if abs(slope) < 1e-6:
        raise DegenerateSlopeError(f"phase slope {slope:g} rad/m: no propagation")
    speed = 2.0 * np.pi * frequency / abs(slope)
    dof = x.size - 2
    ci = None
    if dof > 0:
        tq = stats.t.ppf(0.5 + confidence / 2.0, dof)
        ci = float(tq * speed * fit.stderr / abs(slope))
    return SpeedEstimate(
        speed=float(speed),
        method=PHASE_GRADIENT,
        ci_halfwidth=ci,
        diagnostics={"slope": slope, "r2": float(fit.rvalue**2), "stderr": float(fit.stderr)},
    )


def kspace_transform(record: WavefieldRecord, *, pad_factor: int = 4, min_k_points: int = 256) -> KSpaceMap:
    """Hann-windowed, zero-padded 2D DFT magnitude of the record.

    Both axes are zero-padded by ``pad_factor``; the spatial axis is padded
    further to at least ``min_k_points`` so short arrays still resolve
    wavelengths longer than the aperture. Normalised so that the sum of
    squared magnitudes equals the energy of the windowed record.
    """
    dx = record.spacing
    nx, nt = record.samples.shape
    if nt < 2:
        raise PreconditionError("need at least two frames")
    w = np.outer(np.hanning(nx), np.hanning(nt))
    uw = record.samples * w
    px = max(pad_factor * nx, min_k_points)
    pt = pad_factor * nt
    # +j over x, -j over t: rightward waves land at K > 0 for F > 0
    spec = np.fft.fft(np.fft.ifft(uw, n=px, axis=0) * px, n=pt, axis=1)
    mag = np.abs(np.fft.fftshift(spec)) / math.sqrt(px * pt)
    k_axis = np.fft.fftshift(np.fft.fftfreq(px, dx))
    f_axis = np.fft.fftshift(np.fft.fftfreq(pt, record.frame_interval))
    return KSpaceMap(k_axis, f_axis, mag)


def kspace_peak_speed(kmap: KSpaceMap, excitation_frequency: float, *, min_bins: int = 2) -> SpeedEstimate:
    """Phase velocity f_p / k_p from the K > 0 peak on the excitation-frequency column."""
    f = excitation_frequency
    if not (kmap.f_axis[0] <= f <= kmap.f_axis[-1]):
        raise PreconditionError(f"{f} Hz outside the frequency axis")
    j = int(np.argmin(np.abs(kmap.f_axis - f)))
    pos = np.nonzero(kmap.k_axis > 0)[0]
    profile = kmap.magnitude[pos, j]
    if not np.any(profile > 0):
        raise UnreliablePeakError("no energy at the excitation frequency")
    i = int(np.argmax(profile))
    if i == 0 or i == profile.size - 1:
        raise UnreliablePeakError(f"peak on the K-axis boundary (bin {i})")
    dk = kmap.dk
    k_i = float(kmap.k_axis[pos[i]])
    if k_i < min_bins * dk:
        raise UnreliablePeakError(f"peak at K = {k_i:g} 1/m is within {min_bins} bins of zero")
    ym, y0, yp = profile[i - 1], profile[i], profile[i + 1]
    denom = ym - 2.0 * y0 + yp
    delta = 0.5 * (ym - yp) / denom if denom != 0 else 0.0
    k_p = k_i + delta * dk
    f_p = float(kmap.f_axis[j])
    return SpeedEstimate(
        speed=f_p / k_p,
        method=KSPACE,
        diagnostics={"f_p": f_p, "k_p": k_p, "peak": float(y0)},
    )


def kspace_speed(record: WavefieldRecord, frequency: float, **kwargs) -> SpeedEstimate:
    return kspace_peak_speed(kspace_transform(record, **kwargs), frequency)


def add_measurement_noise(record: WavefieldRecord, sigma: float, seed: int) -> WavefieldRecord:
    """Add i.i.d. N(0, sigma^2) noise from a generator seeded with ``seed``."""
    if sigma < 0:
        raise PreconditionError(f"sigma must be >= 0, got {sigma!r}")
    if sigma == 0:
        return record
    rng = np.random.default_rng(seed)
    return record.with_samples(record.samples + rng.normal(0.0, sigma, record.samples.shape))


def plane_wave_record(speed, frequency, positions, frame_interval=1.0 / 2000.0, n_frames=200, amplitude=1.0, delay=0.0):
    """Synthetic rightward harmonic wave ``A sin(2 pi (f (t - delay) - k x))``."""
    x = np.asarray(positions, dtype=float)[:, None]
    t = np.arange(n_frames)[None, :] * frame_interval
    k = frequency / speed
    return WavefieldRecord(
        x.ravel(), frame_interval, amplitude * np.sin(2.0 * np.pi * (frequency * (t - delay) - k * x))
    )


def write_kspace_csv(path, kmap: KSpaceMap) -> None:
    """Grid CSV: first row is the f axis, first column the k axis."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k_per_m\\f_hz"] + [repr(float(f)) for f in kmap.f_axis])
        for k, row in zip(kmap.k_axis, kmap.magnitude):
            w.writerow([repr(float(k))] + [repr(float(v)) for v in row])
