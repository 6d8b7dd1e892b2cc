"""Minimal standalone SVG line chart writer."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

COLORS = ("#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd")


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / count for k in range(count + 1)]


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 480,
) -> str:
    """Render ``(label, xs, ys)`` series as polylines with axes and a legend."""
    if not series:
        raise ValueError("nothing to plot")
    left, right, top, bottom = 80, 200, 50, 60
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = 0.0, max(max(ys_all), 1e-12) * 1.1
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="28" text-anchor="middle" font-size="16">{_escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{px(t):.1f}" y1="{top + ph}" x2="{px(t):.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.1f}" y="{top + ph + 20}" text-anchor="middle" font-size="11">{t:.3g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{left - 5}" y1="{py(t):.1f}" x2="{left}" y2="{py(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.1f}" text-anchor="end" font-size="11">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle" font-size="13">{_escape(x_label)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 20 {top + ph / 2:.1f})">{_escape(y_label)}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>')
        ly = top + 20 + 22 * k
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 46}" y="{ly + 4}" font-size="12">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_line_chart(path: str | Path, series, **kwargs) -> None:
    Path(path).write_text(line_chart(series, **kwargs))
