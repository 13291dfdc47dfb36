"""Command-line front end: ``surfwave {simulate,analyze,fit,sweep,report}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..analysis import KSPACE, PHASE_GRADIENT, kspace_speed, kspace_transform, phase_delay_speed, write_kspace_csv
from ..dispersion import fit_voigt, read_dispersion_csv, write_fit_csv
from ..errors import ConvergenceError, SurfwaveError
from ..record import read_record_csv, write_record_csv
from ..solver import assemble, build_model, run, stable_time_step
from .config import ConfigError, load_config
from .outputs import (
    dispersion_svg,
    emit_outputs,
    read_sweep_csv,
    write_comparison_csv,
    write_comparison_detail_csv,
)
from .sweep import compare_levels, run_sweep


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="TOML sweep/solver configuration")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="base noise seed")
    p.add_argument("--quiet", action="store_true", help="print only errors")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="surfwave", description="Surface wave phantom simulation and analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate one phantom and write its wavefield CSV")
    p.add_argument("--gel-mm", type=float, default=0.0, help="gel layer thickness in mm")
    p.add_argument("--frequency", type=float, default=100.0, help="excitation frequency in Hz")

    p = sub.add_parser("analyze", parents=[common], help="estimate surface wave speed from a wavefield CSV")
    p.add_argument("wavefield", type=Path)
    p.add_argument("--frequency", type=float, required=True, help="excitation frequency in Hz")
    p.add_argument("--speed-bound", type=float, default=1.0, help="slowest expected speed in m/s")

    p = sub.add_parser("fit", parents=[common], help="fit Voigt parameters to a dispersion CSV")
    p.add_argument("dispersion", type=Path)
    p.add_argument("--rho", type=float, default=1500.0, help="density in kg/m^3")

    p = sub.add_parser("sweep", parents=[common], help="run the gel-thickness by frequency study")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--kspace-grids", action="store_true", help="also write k-space CSV grids")

    p = sub.add_parser("report", parents=[common], help="comparison tables and plot from a sweep.csv")
    p.add_argument("sweep_csv", type=Path)
    p.add_argument("--method", choices=[KSPACE, PHASE_GRADIENT], help="estimator to compare")
    return parser


def _say(args, *lines):
    if not args.quiet:
        for line in lines:
            print(line)


def _simulate(args):
    config = load_config(args.config)
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(config.geometry.build(args.gel_mm / 1e3), pad=config.pad.build(), gel=config.gel.build(),
                        sponge=config.sponge.build(), contact_width=config.excitation.contact_width)
    ops = assemble(model)
    result = run(model, config.excitation.build(args.frequency), config.solver.build(), operators=ops)
    rec_path = out / f"wavefield_{args.gel_mm:g}mm_{args.frequency:g}hz.csv"
    write_record_csv(rec_path, result.record)
    summary_path = out / "model_summary.txt"
    summary_path.write_text(model.summary(stable_time_step(model, config.solver.cfl_factor, ops)))
    _say(args, f"wrote {rec_path} ({result.record.n_frames} frames, dt = {result.dt:.4g} s, {result.n_steps} steps)",
         f"wrote {summary_path}")


def _analyze(args):
    record = read_record_csv(args.wavefield)
    status = 0
    for name, fn in ((PHASE_GRADIENT, lambda: phase_delay_speed(record, args.frequency, speed_bound=args.speed_bound)),
                     (KSPACE, lambda: kspace_speed(record, args.frequency))):
        try:
            est = fn()
        except SurfwaveError as exc:
            print(f"{name}: failed: {exc}", file=sys.stderr)
            status = 1
            continue
        ci = f" +/- {est.ci_halfwidth:.4f}" if est.ci_halfwidth is not None else ""
        _say(args, f"{name}: {est.speed:.4f}{ci} m/s")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        write_kspace_csv(args.out / "kspace.csv", kspace_transform(record))
    return status


def _fit(args):
    points = read_dispersion_csv(args.dispersion)
    try:
        fit = fit_voigt(points, rho=args.rho)
    except ConvergenceError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        if exc.best is None:
            raise
        fit = exc.best
    _say(args, f"mu1 = {fit.material.mu1:.6g} Pa", f"mu2 = {fit.material.mu2:.6g} Pa s",
         f"rms residual = {fit.rms_residual:.4g} m/s ({fit.n_points} points)")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        write_fit_csv(args.out / "fit.csv", fit)


def _sweep(args):
    config = load_config(args.config)
    if args.seed is not None:
        config.base_seed = args.seed
    if args.workers is not None:
        config.workers = args.workers
    if args.out is not None:
        config.output.directory = str(args.out)

    def progress(key, rows):
        failed = sum(not r.ok for r in rows)
        _say(args, f"gel {key[0] * 1e3:g} mm, {key[1]:g} Hz: {len(rows) - failed} ok, {failed} failed")

    result = run_sweep(config, progress=progress)
    report = compare_levels(result, config.analysis.primary_method)
    paths = emit_outputs(result, report, config, kspace_grids=args.kspace_grids or None)
    _say(args, *(f"wrote {p}" for p in paths))


def _report(args):
    result = read_sweep_csv(args.sweep_csv)
    config = load_config(args.config)
    method = args.method or config.analysis.primary_method
    report = compare_levels(result, method)
    out = args.out or args.sweep_csv.parent
    out.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(out / "comparison.csv", report)
    write_comparison_detail_csv(out / "comparison_detail.csv", report)
    (out / "dispersion.svg").write_text(dispersion_svg(result, method))
    _say(args, f"{'f (Hz)':>7} {'gel (mm)':>8} {'change %':>9} {'p':>7}")
    for r in report.rows:
        _say(args, f"{r.frequency:7g} {r.gel_level * 1e3:8g} {r.percent_change:9.2f} {r.p_value:7.3f}")


_COMMANDS = {"simulate": _simulate, "analyze": _analyze, "fit": _fit, "sweep": _sweep, "report": _report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args) or 0
    except (SurfwaveError, ConfigError, OSError, ValueError) as exc:
        print(f"surfwave {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
