"""CSV / JSON datasets and plot emission (gnuplot script plus a standalone SVG)."""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__


def fmt(v) -> str:
    """17 significant digits (round-trips a double); empty for undefined."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return ""
    return format(v, ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and a float array with NaN for empty cells (non-numeric columns also NaN)."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]

    def conv(c):
        try:
            return float(c) if c != "" else math.nan
        except ValueError:
            return math.nan

    data = np.array([[conv(c) for c in r] for r in rows[1:]], dtype=float)
    return header, data.reshape(len(rows) - 1, len(header))


def _jsonable(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and not math.isfinite(o):
        return None
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path, config: dict, results, tolerances: Optional[dict] = None,
               extra_meta: Optional[dict] = None) -> Path:
    meta = {"version": __version__, "tolerances": tolerances or {}}
    if extra_meta:
        meta.update(extra_meta)
    doc = {"config": config, "results": results, "metadata": meta}
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n",
                    encoding="utf-8")
    return path


# ------------------------------------------------------------ plots


def gnuplot_script(path, csv_name: str, columns: Sequence[tuple[int, object, str, bool]],
                   xlabel: str, ylabel: str, logy: bool = False,
                   image: Optional[str] = None) -> Path:
    """Script plotting ``using x:y`` pairs from a CSV; dashed=True gives a dash line.

    A string ``yc`` is passed to gnuplot verbatim (for filtered expressions).
    """
    lines = [
        "set datafile separator ','",
        "set key outside right",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    if logy:
        lines.append("set logscale y")
        lines.append("set format y '10^{%L}'")
    if image:
        lines.append("set terminal pngcairo size 900,600")
        lines.append(f"set output '{image}'")
    parts = []
    for xc, yc, title, dashed in columns:
        style = "lines dt 2 lw 1.5" if dashed else "lines lw 2"
        if isinstance(yc, str):
            ycol = yc
        else:
            ycol = f"(abs(${yc}))" if logy else str(yc)
        parts.append(f"'{csv_name}' using {xc}:{ycol} with {style} title '{title}'")
    lines.append("plot " + ", \\\n     ".join(parts))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#17becf", "#7f7f7f", "#bcbd22", "#393b79", "#637939"]


def svg_plot(path, series: Sequence[tuple[np.ndarray, np.ndarray, str, bool]],
             xlabel: str, ylabel: str, logy: bool = False,
             width: int = 720, height: int = 480) -> Path:
    """Minimal line chart; NaN breaks a polyline."""
    ml, mr, mt, mb = 60, 130, 20, 45
    xs, ys = [], []
    prepared = []
    for x, y, title, dashed in series:
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if logy:
            with np.errstate(divide="ignore", invalid="ignore"):
                y = np.where(np.abs(y) > 0, np.log10(np.abs(y)), np.nan)
        ok = np.isfinite(x) & np.isfinite(y)
        xs.append(x[ok])
        ys.append(y[ok])
        prepared.append((x, y, title, dashed))
    allx = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    if allx.size == 0:
        allx, ally = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = width - ml - mr, height - mt - mb

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for i, (x, y, title, dashed) in enumerate(prepared):
        color = _PALETTE[i % len(_PALETTE)]
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        seg = []
        for xv, yv in zip(x, y):
            if np.isfinite(xv) and np.isfinite(yv):
                seg.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif seg:
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                           f'points="{" ".join(seg)}"/>')
                seg = []
        if seg:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                       f'points="{" ".join(seg)}"/>')
        ly = mt + 16 * (i + 1)
        out.append(f'<line x1="{width - mr + 10}" y1="{ly - 4}" x2="{width - mr + 35}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{width - mr + 40}" y="{ly}">{title}</text>')
    ylab = (lambda v: f"1e{v:.0f}") if logy else (lambda v: f"{v:.4g}")
    out += [
        f'<text x="{ml}" y="{height - mb + 16}">{x0:.4g}</text>',
        f'<text x="{ml + pw}" y="{height - mb + 16}" text-anchor="end">{x1:.4g}</text>',
        f'<text x="{ml - 5}" y="{mt + ph}" text-anchor="end">{ylab(y0)}</text>',
        f'<text x="{ml - 5}" y="{mt + 10}" text-anchor="end">{ylab(y1)}</text>',
        f'<text x="{ml + pw / 2}" y="{height - 8}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{mt + ph / 2}" transform="rotate(-90 14 {mt + ph / 2})" '
        f'text-anchor="middle">{ylabel}</text>',
        "</svg>",
    ]
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
