"""Minimal standalone SVG line charts (no plotting library)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_chart(
    series,
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "",
    width: int = 720,
    height: int = 420,
    ylim: tuple[float, float] | None = None,
    max_points: int = 2000,
) -> str:
    """Render ``[(label, xs, ys), ...]`` as an SVG document string.

    Values outside ``ylim`` are clamped to the frame so divergent runs show as
    a trace leaving the plot.
    """
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    prepared = []
    for label, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if len(xs) > max_points:
            step = int(math.ceil(len(xs) / max_points))
            keep = np.r_[np.arange(0, len(xs), step), len(xs) - 1]
            xs, ys = xs[keep], ys[keep]
        prepared.append((label, xs, ys))
    all_x = np.concatenate([p[1] for p in prepared]) if prepared else np.array([0.0, 1.0])
    finite_y = np.concatenate([p[2][np.isfinite(p[2])] for p in prepared]) if prepared else np.array([])
    x0, x1 = float(all_x.min()), float(all_x.max())
    if ylim is None:
        y0, y1 = (float(finite_y.min()), float(finite_y.max())) if finite_y.size else (-1.0, 1.0)
    else:
        y0, y1 = ylim
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y0, y1 = y0 - 1.0, y1 + 1.0

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        v = min(max(v, y0), y1)
        return mt + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for tx in nice_ticks(x0, x1):
        X = sx(tx)
        out.append(f'<line x1="{X:.2f}" y1="{mt}" x2="{X:.2f}" y2="{mt + ph}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{X:.2f}" y="{mt + ph + 18}" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in nice_ticks(y0, y1):
        Y = sy(ty)
        out.append(f'<line x1="{ml}" y1="{Y:.2f}" x2="{ml + pw}" y2="{Y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{ml - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(ty)}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{mt + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {mt + ph / 2})">{escape(ylabel)}</text>'
    )
    for i, (label, xs, ys) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = mt + 16 + 16 * i
        out.append(f'<line x1="{ml + pw - 150}" y1="{ly - 4}" x2="{ml + pw - 130}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw - 125}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(path, series, **kw) -> None:
    with open(path, "w") as fh:
        fh.write(line_chart(series, **kw))
