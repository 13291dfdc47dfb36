"""Flat-file outputs of a sweep: CSV tables, an SVG plot and a run manifest."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from ..analysis import kspace_transform, write_kspace_csv
from ..stats import describe
from .config import SweepConfig
from .sweep import ComparisonReport, SweepResult, SweepRow

SWEEP_HEADER = ["gel_thickness_mm", "frequency_hz", "rep", "method", "speed_mps", "ci_mps", "status"]
COMPARISON_HEADER = ["frequency_hz", "gel_level_mm", "t", "df", "p", "significant"]
DETAIL_HEADER = ["frequency_hz", "gel_level_mm", "method", "base_mean_mps", "level_mean_mps", "percent_change", "t", "df", "p", "significant"]
MANIFEST = "run_manifest.toml"


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def _mm(level: float) -> str:
    return f"{level * 1e3:g}"


def _open(path: Path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_sweep_csv(path, result: SweepResult) -> None:
    with _open(Path(path)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in result.rows:
            w.writerow([_mm(r.gel_level), f"{r.frequency:g}", r.rep, r.method, _num(r.speed), _num(r.ci), r.status])


def read_sweep_csv(path) -> SweepResult:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER:
            raise ValueError(f"{path}: expected header {','.join(SWEEP_HEADER)}")
        rows = []
        for i, d in enumerate(reader, start=2):
            try:
                rows.append(SweepRow(
                    gel_level=float(d["gel_thickness_mm"]) / 1e3,
                    frequency=float(d["frequency_hz"]),
                    rep=int(d["rep"]),
                    method=d["method"],
                    speed=float(d["speed_mps"]) if d["speed_mps"] else math.nan,
                    ci=float(d["ci_mps"]) if d["ci_mps"] else None,
                    status=d["status"],
                ))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{i}: {exc}") from exc
    return SweepResult(rows=rows)


def write_comparison_csv(path, report: ComparisonReport) -> None:
    with _open(Path(path)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_HEADER)
        for r in report.rows:
            w.writerow([f"{r.frequency:g}", _mm(r.gel_level), _num(r.t_statistic), _num(r.degrees_of_freedom),
                        _num(r.p_value), str(r.significant).lower()])


def write_comparison_detail_csv(path, report: ComparisonReport) -> None:
    with _open(Path(path)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DETAIL_HEADER)
        for r in report.rows:
            w.writerow([f"{r.frequency:g}", _mm(r.gel_level), r.method, _num(r.base_mean), _num(r.level_mean),
                        _num(r.percent_change), _num(r.t_statistic), _num(r.degrees_of_freedom),
                        _num(r.p_value), str(r.significant).lower()])


_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def dispersion_svg(result: SweepResult, method: str, width: int = 640, height: int = 440) -> str:
    """Mean speed against frequency, one polyline per gel level, SD error bars."""
    ml, mr, mt, mb = 70, 150, 20, 55
    pw, ph = width - ml - mr, height - mt - mb
    series = []
    for level in result.levels:
        pts = []
        for f in result.frequencies:
            s = result.speeds(level, f, method)
            if s:
                d = describe(s)
                pts.append((f, d.mean, d.sd or 0.0))
        series.append((level, pts))
    xs = [p[0] for _, pts in series for p in pts]
    ys = [v for _, pts in series for p in pts for v in (p[1] - p[2], p[1] + p[2])]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (0.0, max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    y1 *= 1.05

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<path d="M{ml},{mt} V{mt + ph} H{ml + pw}" stroke="black" fill="none"/>',
    ]
    for i in range(6):
        yv = y0 + (y1 - y0) * i / 5
        out.append(f'<path d="M{ml - 4},{py(yv):.2f} H{ml}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{py(yv) + 4:.2f}" font-size="11" text-anchor="end">{yv:.3g}</text>')
    for f in sorted(set(xs)):
        out.append(f'<path d="M{px(f):.2f},{mt + ph} v4" stroke="black"/>')
        out.append(f'<text x="{px(f):.2f}" y="{mt + ph + 18}" font-size="11" text-anchor="middle">{f:g}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" font-size="12" text-anchor="middle">Frequency (Hz)</text>')
    out.append(f'<text x="16" y="{mt + ph / 2}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {mt + ph / 2})">Surface wave speed (m/s)</text>')
    for i, (level, pts) in enumerate(series):
        colour = _COLOURS[i % len(_COLOURS)]
        if pts:
            d = " ".join(f"{'M' if j == 0 else 'L'}{px(f):.2f},{py(m):.2f}" for j, (f, m, _) in enumerate(pts))
            out.append(f'<path d="{d}" stroke="{colour}" stroke-width="1.5" fill="none"/>')
            for f, m, s in pts:
                out.append(f'<path d="M{px(f):.2f},{py(m - s):.2f} V{py(m + s):.2f} M{px(f) - 4:.2f},{py(m - s):.2f} h8 '
                           f'M{px(f) - 4:.2f},{py(m + s):.2f} h8" stroke="{colour}" fill="none"/>')
                out.append(f'<circle cx="{px(f):.2f}" cy="{py(m):.2f}" r="3" fill="{colour}"/>')
        ly = mt + 10 + 18 * i
        out.append(f'<path d="M{ml + pw + 15},{ly} h20" stroke="{colour}" stroke-width="1.5"/>')
        out.append(f'<text x="{ml + pw + 40}" y="{ly + 4}" font-size="11">gel {_mm(level)} mm</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_outputs(result: SweepResult, report: ComparisonReport, config: SweepConfig, out_dir=None, *, kspace_grids=None) -> list:
    """Write the sweep files into ``out_dir`` and return their paths."""
    out = Path(config.output.directory if out_dir is None else out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    paths = [out / "sweep.csv", out / "comparison.csv", out / "comparison_detail.csv", out / "dispersion.svg", out / MANIFEST]
    write_sweep_csv(paths[0], result)
    write_comparison_csv(paths[1], report)
    write_comparison_detail_csv(paths[2], report)
    with _open(paths[3]) as fh:
        fh.write(dispersion_svg(result, report.method))
    with _open(paths[4]) as fh:
        fh.write(manifest_text(result, config))
    if config.output.kspace_grids if kspace_grids is None else kspace_grids:
        a = config.analysis
        for (level, freq), record in sorted(result.records.items()):
            p = out / f"kspace_{_mm(level)}_{freq:g}.csv"
            write_kspace_csv(p, kspace_transform(record, pad_factor=a.pad_factor, min_k_points=a.min_k_points))
            paths.append(p)
    return paths


def manifest_text(result: SweepResult, config: SweepConfig) -> str:
    """Full config as TOML, followed by the noise seed of every repetition as comments."""
    lines = [config.dumps().rstrip("\n"), "", "# seeds per (gel_mm, frequency_hz, rep)"]
    seen = set()
    for r in result.rows:
        key = (r.gel_level, r.frequency, r.rep)
        if r.seed is not None and key not in seen:
            seen.add(key)
            lines.append(f"# {_mm(r.gel_level)} {r.frequency:g} {r.rep} seed={r.seed}")
    return "\n".join(lines) + "\n"
