"""Minimal SVG 1.1 line charts, dependency-free and byte-deterministic.

Just enough for the CLI's diagnostic plots: stacked panels, each with
axes, 1-2-5 ticks, unit-bearing axis labels, polyline series and
optional point markers.  Non-finite samples break the polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

__all__ = ["Series", "Panel", "write_chart"]

_COLORS = ("#1f6fb2", "#d1495b", "#3a7d44", "#8d5a97", "#c77d2f")


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    markers: bool = False


@dataclass
class Panel:
    title: str
    x_label: str
    y_label: str
    series: list[Series] = field(default_factory=list)


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    norm = raw / mag
    if norm < 1.5:
        step = mag
    elif norm < 3.5:
        step = 2.0 * mag
    elif norm < 7.5:
        step = 5.0 * mag
    else:
        step = 10.0 * mag
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 0.5 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


def _panel_svg(panel: Panel, width: int, height: int, y0: int) -> list[str]:
    left, right, top, bottom = 64, 16, 28, 44
    px0, px1 = left, width - right
    py0, py1 = y0 + top, y0 + height - bottom

    xs = [float(v) for s in panel.series for v in s.x if math.isfinite(v)]
    ys = [
        float(v)
        for s in panel.series
        for u, v in zip(s.x, s.y)
        if math.isfinite(u) and math.isfinite(v)
    ]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def sx(v: float) -> float:
        return px0 + (v - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(v: float) -> float:
        return py1 - (v - y_lo) / (y_hi - y_lo) * (py1 - py0)

    out = []
    out.append(
        f'<rect x="{px0}" y="{py0}" width="{px1 - px0}" height="{py1 - py0}" '
        'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    out.append(
        f'<text x="{(px0 + px1) / 2:.1f}" y="{y0 + 18}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{panel.title}</text>'
    )
    for t in _ticks(x_lo, x_hi):
        x = sx(t)
        out.append(
            f'<line x1="{x:.2f}" y1="{py1}" x2="{x:.2f}" y2="{py1 + 4}" '
            'stroke="#444444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{py1 + 16}" text-anchor="middle" '
            f'font-size="10" font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = sy(t)
        out.append(
            f'<line x1="{px0 - 4}" y1="{y:.2f}" x2="{px0}" y2="{y:.2f}" '
            'stroke="#444444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px0 - 6}" y="{y + 3:.2f}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{(px0 + px1) / 2:.1f}" y="{py1 + 32}" text-anchor="middle" '
        f'font-size="11" font-family="sans-serif">{panel.x_label}</text>'
    )
    out.append(
        f'<text x="16" y="{(py0 + py1) / 2:.1f}" text-anchor="middle" font-size="11" '
        f'font-family="sans-serif" transform="rotate(-90 16 {(py0 + py1) / 2:.1f})">'
        f"{panel.y_label}</text>"
    )
    for k, s in enumerate(panel.series):
        color = _COLORS[k % len(_COLORS)]
        segment: list[str] = []
        segments: list[list[str]] = []
        for u, v in zip(s.x, s.y):
            if math.isfinite(u) and math.isfinite(v):
                segment.append(f"{sx(float(u)):.2f},{sy(float(v)):.2f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) > 1:
                out.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                    f'points="{" ".join(seg)}"/>'
                )
        if s.markers:
            for u, v in zip(s.x, s.y):
                if math.isfinite(u) and math.isfinite(v):
                    out.append(
                        f'<circle cx="{sx(float(u)):.2f}" cy="{sy(float(v)):.2f}" '
                        f'r="2.5" fill="{color}"/>'
                    )
        out.append(
            f'<text x="{px1 - 6}" y="{py0 + 14 + 13 * k}" text-anchor="end" '
            f'font-size="10" font-family="sans-serif" fill="{color}">{s.label}</text>'
        )
    return out


def write_chart(path, panels: Sequence[Panel], width: int = 720, panel_height: int = 300) -> None:
    """Write stacked line-chart panels as one SVG 1.1 document."""
    total = panel_height * len(panels)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{total}" viewBox="0 0 {width} {total}">',
        f'<rect width="{width}" height="{total}" fill="#ffffff"/>',
    ]
    for i, panel in enumerate(panels):
        parts.extend(_panel_svg(panel, width, panel_height, i * panel_height))
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
