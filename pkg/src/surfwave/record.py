"""Spatiotemporal surface displacement records and their CSV form."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

_COLUMN = re.compile(r"^uy_x(-?[0-9.eE+-]+)mm$")


@dataclass(frozen=True, eq=False)
class WavefieldRecord:
    """Vertical displacement ``samples[position, frame]`` in metres.

    ``positions`` are x-coordinates [m] along the sponge top surface; frame
    ``k`` is taken at ``k * frame_interval`` seconds.
    """

    positions: np.ndarray
    frame_interval: float
    samples: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        smp = np.asarray(self.samples, dtype=float)
        if pos.ndim != 1 or smp.ndim != 2 or smp.shape[0] != pos.size:
            raise PreconditionError(
                f"samples shape {smp.shape} does not match {pos.size} positions"
            )
        if not self.frame_interval > 0:
            raise PreconditionError("frame_interval must be > 0")
        if not np.all(np.isfinite(smp)):
            raise PreconditionError("record contains non-finite samples")
        pos.setflags(write=False)
        smp.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "samples", smp)

    @property
    def n_frames(self) -> int:
        return self.samples.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_frames) * self.frame_interval

    @property
    def spacing(self) -> float:
        """Uniform position spacing; raises if the positions are not uniform."""
        if self.positions.size < 2:
            raise PreconditionError("need at least two positions for a spacing")
        d = np.diff(self.positions)
        if np.any(d <= 0) or np.ptp(d) > 1e-9 * max(abs(d[0]), 1e-12) + 1e-12:
            raise PreconditionError("positions are not uniformly spaced and increasing")
        return float(np.mean(d))

    def with_samples(self, samples) -> "WavefieldRecord":
        return WavefieldRecord(self.positions, self.frame_interval, samples)

    def delayed(self, frames: int) -> "WavefieldRecord":
        """Shift the record later by ``frames`` frames, zero-filling the start."""
        out = np.zeros_like(self.samples)
        if frames < self.n_frames:
            out[:, frames:] = self.samples[:, : self.n_frames - frames]
        return self.with_samples(out)

    def __eq__(self, other):
        if not isinstance(other, WavefieldRecord):
            return NotImplemented
        return (
            self.frame_interval == other.frame_interval
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.samples, other.samples)
        )


def _column_name(x):
    return f"uy_x{x * 1e3:.6g}mm"


def write_record_csv(path, record: WavefieldRecord) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s"] + [_column_name(x) for x in record.positions])
        for k, t in enumerate(record.times):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in record.samples[:, k]])


def read_record_csv(path) -> WavefieldRecord:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t_s":
        raise PreconditionError(f"{path}: first column must be t_s")
    positions = []
    for name in rows[0][1:]:
        m = _COLUMN.match(name)
        if not m:
            raise PreconditionError(f"{path}: bad column name {name!r}")
        positions.append(float(m.group(1)) * 1e-3)
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(rows[0]))
    t = data[:, 0]
    if t.size >= 2:
        dt = np.diff(t)
        if np.ptp(dt) > 1e-9 * dt[0]:
            raise PreconditionError(f"{path}: non-uniform time sampling")
        interval = float((t[-1] - t[0]) / (t.size - 1))
    else:
        raise PreconditionError(f"{path}: need at least two frames")
    return WavefieldRecord(np.array(positions), interval, data[:, 1:].T.copy())
