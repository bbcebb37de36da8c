"""CSV tables and minimal SVG line plots."""

from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

import numpy as np


def format_value(value) -> str:
    """Shortest round-tripping text; undefined (``None`` / masked) becomes empty."""
    if value is None or value is np.ma.masked:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def _column_values(col):
    if isinstance(col, np.ma.MaskedArray):
        mask = np.ma.getmaskarray(col)
        return [None if m else v for v, m in zip(col.data.tolist(), mask.tolist())]
    return list(np.asarray(col).tolist()) if not isinstance(col, list) else col


def csv_text(header, columns) -> str:
    cols = [_column_values(c) for c in columns]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*cols):
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def csv_rows_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_value(v) for v in row])
    return buf.getvalue()


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
_DASHES = ["", "6,3", "2,2", "8,3,2,3"]


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def svg_plot(series, title="", xlabel="", ylabel="", width=640, height=400) -> str:
    """Polyline plot of ``[(label, x, y), ...]``; masked or NaN points break the line."""
    margin_l, margin_r, margin_t, margin_b = 70, 150, 40, 50
    pw, ph = width - margin_l - margin_r, height - margin_t - margin_b
    xs, ys = [], []
    for _, x, y in series:
        y = np.ma.filled(np.ma.asarray(y, dtype=float), np.nan)
        ok = np.isfinite(y)
        xs.append(np.asarray(x, dtype=float)[ok])
        ys.append(y[ok])
    allx = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    if allx.size == 0:
        allx, ally = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return margin_l + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return margin_t + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{margin_l + pw / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{margin_l}" y="{margin_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.1f}" y1="{margin_t + ph}" x2="{px:.1f}" y2="{margin_t + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{margin_t + ph + 17}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{margin_l - 5}" y1="{py:.1f}" x2="{margin_l}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{margin_l - 8}" y="{py + 4:.1f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{margin_l + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="15" y="{margin_t + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {margin_t + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, (label, x, y) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        dash = _DASHES[(i // len(_PALETTE)) % len(_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        y = np.ma.filled(np.ma.asarray(y, dtype=float), np.nan)
        x = np.asarray(x, dtype=float)
        segment = []
        for xv, yv in zip(x, y):
            if np.isfinite(yv):
                segment.append(f"{sx(xv):.2f},{sy(yv):.2f}")
            elif segment:
                out.append(f'<polyline fill="none" stroke="{color}"{dash_attr} points="{" ".join(segment)}"/>')
                segment = []
        if segment:
            out.append(f'<polyline fill="none" stroke="{color}"{dash_attr} points="{" ".join(segment)}"/>')
        ly = margin_t + 12 + 16 * i
        lx = margin_l + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}"{dash_attr}/>')
        out.append(f'<text x="{lx + 25}" y="{ly}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
