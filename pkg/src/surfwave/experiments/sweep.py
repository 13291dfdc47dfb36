"""Gel-thickness by frequency sweep and the level comparison."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..analysis import (
    KSPACE,
    PHASE_GRADIENT,
    add_measurement_noise,
    kspace_speed,
    phase_delay_speed,
)
from ..errors import PreconditionError, SurfwaveError
from ..record import WavefieldRecord
from ..solver import build_model, run
from ..stats import describe, t_test_unpaired
from .config import SweepConfig

METHODS = (PHASE_GRADIENT, KSPACE)
OK = "ok"


@dataclass(frozen=True)
class SweepRow:
    gel_level: float
    frequency: float
    rep: int
    method: str
    speed: float
    ci: Optional[float]
    status: str = OK
    seed: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.status == OK


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    #: clean (noise-free) record for each simulated (level, frequency) cell
    records: dict = field(default_factory=dict)

    def speeds(self, level: float, frequency: float, method: str) -> list:
        return [
            r.speed for r in self.rows
            if r.ok and r.gel_level == level and r.frequency == frequency and r.method == method
        ]

    @property
    def levels(self) -> list:
        return sorted({r.gel_level for r in self.rows})

    @property
    def frequencies(self) -> list:
        return sorted({r.frequency for r in self.rows})

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]


@dataclass(frozen=True)
class LevelComparison:
    frequency: float
    gel_level: float
    method: str
    base_mean: float
    level_mean: float
    percent_change: float
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    significant: bool


@dataclass
class ComparisonReport:
    method: str
    rows: list = field(default_factory=list)

    def lookup(self, frequency: float, level: float) -> LevelComparison:
        for r in self.rows:
            if r.frequency == frequency and r.gel_level == level:
                return r
        raise KeyError((frequency, level))


def cell_seed(config: SweepConfig, level_index: int, freq_index: int, rep: int) -> int:
    """Seed for one noisy copy: base seed plus its row index in sweep order."""
    row = (level_index * len(config.frequencies) + freq_index) * config.repetitions + rep
    return config.base_seed + row


def _estimate(record, frequency, method, config):
    a = config.analysis
    if method == PHASE_GRADIENT:
        return phase_delay_speed(record, frequency, speed_bound=a.speed_bound)
    return kspace_speed(record, frequency, pad_factor=a.pad_factor, min_k_points=a.min_k_points)


def simulate_cell(config: SweepConfig, level: float, frequency: float) -> WavefieldRecord:
    model = build_model(
        config.geometry.build(level),
        pad=config.pad.build(),
        gel=config.gel.build(),
        sponge=config.sponge.build(),
        contact_width=config.excitation.contact_width,
    )
    return run(model, config.excitation.build(frequency), config.solver.build()).record


def _run_cell(args):
    config, li, fi = args
    level = config.gel_levels[li]
    freq = config.frequencies[fi]
    rows = []
    try:
        record = simulate_cell(config, level, freq)
    except (SurfwaveError, ValueError) as exc:
        reason = f"failed: {type(exc).__name__}: {exc}"
        for rep in range(config.repetitions):
            seed = cell_seed(config, li, fi, rep)
            rows += [SweepRow(level, freq, rep, m, math.nan, None, reason, seed) for m in METHODS]
        return rows, None
    for rep in range(config.repetitions):
        seed = cell_seed(config, li, fi, rep)
        noisy = add_measurement_noise(record, config.sigma, seed)
        for method in METHODS:
            try:
                est = _estimate(noisy, freq, method, config)
            except (SurfwaveError, ValueError) as exc:
                rows.append(SweepRow(level, freq, rep, method, math.nan, None, f"failed: {type(exc).__name__}: {exc}", seed))
            else:
                rows.append(SweepRow(level, freq, rep, method, est.speed, est.ci_halfwidth, OK, seed))
    return rows, record


def run_sweep(config: SweepConfig, *, progress=None) -> SweepResult:
    """Simulate every (level, frequency) cell once and estimate each noisy repetition.

    Cells run on a pool of ``config.workers`` processes; rows come back in
    (level, frequency, rep, method) order regardless of scheduling.
    """
    tasks = [(config, li, fi) for li in range(len(config.gel_levels)) for fi in range(len(config.frequencies))]
    result = SweepResult()
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = pool.map(_run_cell, tasks)
            for (c, li, fi), (rows, rec) in zip(tasks, outputs):
                _collect(result, config, li, fi, rows, rec, progress)
    else:
        for c, li, fi in tasks:
            rows, rec = _run_cell((c, li, fi))
            _collect(result, config, li, fi, rows, rec, progress)
    return result


def _collect(result, config, li, fi, rows, record, progress):
    result.rows.extend(rows)
    key = (config.gel_levels[li], config.frequencies[fi])
    if record is not None:
        result.records[key] = record
    if progress is not None:
        progress(key, rows)


def compare_levels(result: SweepResult, method: str = PHASE_GRADIENT, *, base_level: float = 0.0, equal_var: bool = False) -> ComparisonReport:
    """Percent change of mean speed and t-test against the base level, per frequency.

    Cells with fewer than two valid repetitions on either side get NaN
    statistics and are never flagged significant.
    """
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}")
    levels = result.levels
    if not any(lv == base_level for lv in levels):
        raise PreconditionError(f"sweep has no base level {base_level * 1e3:g} mm")
    report = ComparisonReport(method)
    for freq in result.frequencies:
        base = result.speeds(base_level, freq, method)
        for level in levels:
            if level == base_level:
                continue
            other = result.speeds(level, freq, method)
            bm = describe(base).mean if base else math.nan
            lm = describe(other).mean if other else math.nan
            change = 100.0 * (lm - bm) / bm if base and other else math.nan
            if len(base) >= 2 and len(other) >= 2:
                tt = t_test_unpaired(other, base, equal_var=equal_var)
                stats = (tt.t_statistic, tt.degrees_of_freedom, tt.p_value, tt.significant)
            else:
                stats = (math.nan, math.nan, math.nan, False)
            report.rows.append(LevelComparison(freq, level, method, bm, lm, change, *stats))
    return report
