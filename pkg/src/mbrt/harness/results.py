"""Result emission: fixed-schema CSVs and self-contained SVG line plots.

Both emitters format numbers with fixed precision and iterate rows/series in
the order given, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from mbrt.errors import InputError


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6f}"
    return str(value)


def write_csv(path, header, rows) -> None:
    header = list(header)
    lines = [",".join(header)]
    for row in rows:
        row = list(row)
        if len(row) != len(header):
            raise InputError(f"row has {len(row)} cells, header has {len(header)}")
        lines.append(",".join(format_cell(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
_W, _H, _ML, _MR, _MT, _MB = 640, 440, 70, 20, 40, 60


def svg_line_plot(path, series: dict, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Minimal multi-series line plot; axes cover the data extrema exactly."""
    if not series or all(len(pts) == 0 for pts in series.values()):
        raise InputError("svg_line_plot needs at least one nonempty series")
    xs = [float(p[0]) for pts in series.values() for p in pts]
    ys = [float(p[1]) for pts in series.values() for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x):
        return _ML + (x - x0) / xspan * pw

    def sy(y):
        return _MT + ph - (y - y0) / yspan * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{_ML}" y1="{_MT + ph}" x2="{_ML + pw}" y2="{_MT + ph}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + ph}" stroke="black"/>',
        f'<text x="{_ML + pw / 2:.1f}" y="{_H - 15}" text-anchor="middle">{xlabel}</text>',
        f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">{ylabel}</text>',
    ]
    for x in (x0, x1):
        parts.append(f'<text x="{sx(x):.1f}" y="{_MT + ph + 16}" text-anchor="middle">{x:g}</text>')
    for y in (y0, y1):
        parts.append(f'<text x="{_ML - 6}" y="{sy(y) + 4:.1f}" text-anchor="end">{y:g}</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = _MT + 14 + 16 * i
        parts.append(f'<line x1="{_ML + pw - 130}" y1="{ly - 4}" x2="{_ML + pw - 110}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_ML + pw - 104}" y="{ly}">{name}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
