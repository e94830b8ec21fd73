"""Minimal dependency-free SVG line plots for scenario CSV traces.

The SVG text is generated directly with fixed float formatting, so identical
input bytes always produce identical output bytes.  CSV remains the data
contract; these plots are a convenience.
"""

from __future__ import annotations

import csv
from pathlib import Path

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 24, 24, 52
PALETTE = ("#1b6ca8", "#c0392b", "#27831f", "#8e44ad", "#c87f0a", "#16a085")


def read_csv_columns(csv_path: str | Path) -> tuple[list[str], list[list[float]]]:
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{csv_path}: empty CSV")
    header = rows[0]
    data = [[float(v) for v in row] for row in rows[1:] if row]
    return header, data


def emit_plot(csv_path: str | Path, columns: list[str], output_path: str | Path) -> Path:
    """Render selected CSV columns against the first (time) column as an SVG.

    One polyline per requested column; an empty column selection plots every
    column after the first.  Empty traces and unknown column names raise
    before any file is written.
    """
    header, data = read_csv_columns(csv_path)
    if not data:
        raise ValueError(f"{csv_path}: no data rows to plot")
    if not columns:
        columns = header[1:]
    for name in columns:
        if name not in header:
            raise ValueError(f"column {name!r} not found in {csv_path}; have {header}")
    if not columns:
        raise ValueError(f"{csv_path}: no plottable columns")

    xs = [row[0] for row in data]
    series = {name: [row[header.index(name)] for row in data] for name in columns}

    x_lo, x_hi = min(xs), max(xs)
    y_all = [v for vals in series.values() for v in vals]
    y_lo, y_hi = min(y_all), max(y_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R)

    def sy(y: float) -> float:
        return HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
    ]
    for i in range(5):
        frac = i / 4.0
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        xpix, ypix = sx(xv), sy(yv)
        parts.append(
            f'<line x1="{xpix:.2f}" y1="{HEIGHT - MARGIN_B}" x2="{xpix:.2f}" '
            f'y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{xpix:.2f}" y="{HEIGHT - MARGIN_B + 18}" font-size="11" '
            f'text-anchor="middle">{xv:.4g}</text>'
        )
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{ypix:.2f}" x2="{MARGIN_L}" '
            f'y2="{ypix:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{ypix + 4:.2f}" font-size="11" '
            f'text-anchor="end">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.2f}" y="{HEIGHT - 12}" '
        f'font-size="12" text-anchor="middle">{header[0]}</text>'
    )
    for k, name in enumerate(columns):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, series[name]))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        ly = MARGIN_T + 16 + 16 * k
        lx = WIDTH - MARGIN_R - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{ly}" font-size="12">{name}</text>')
    parts.append("</svg>")

    output_path = Path(output_path)
    output_path.write_text("\n".join(parts) + "\n")
    return output_path
