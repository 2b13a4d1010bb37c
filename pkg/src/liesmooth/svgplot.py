"""Minimal hand-rolled SVG log-log chart (no plotting dependency)."""

from __future__ import annotations

import math

_COLORS = ("#1b6ca8", "#c23b22", "#2e8540", "#8a5aab", "#b8860b", "#444444")


def _ticks(lo: float, hi: float):
    lo_e = int(math.floor(math.log10(lo)))
    hi_e = int(math.ceil(math.log10(hi)))
    return [10.0 ** e for e in range(lo_e, hi_e + 1)]


def write_loglog(path, xs, series: dict, title: str = "",
                 xlabel: str = "", ylabel: str = "",
                 width: int = 640, height: int = 480):
    """Write a log-log polyline chart; zero/negative values are dropped."""
    margin = 70
    pts_all = [(x, y) for ys in series.values() for x, y in zip(xs, ys)
               if x > 0.0 and y > 0.0]
    if not pts_all:
        raise ValueError("nothing positive to plot")
    x_lo = min(p[0] for p in pts_all); x_hi = max(p[0] for p in pts_all)
    y_lo = min(p[1] for p in pts_all); y_hi = max(p[1] for p in pts_all)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo / 2.0, x_hi * 2.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo / 2.0, y_hi * 2.0

    def sx(x):
        return margin + (math.log10(x) - math.log10(x_lo)) / \
            (math.log10(x_hi) - math.log10(x_lo)) * (width - 2 * margin)

    def sy(y):
        return height - margin - (math.log10(y) - math.log10(y_lo)) / \
            (math.log10(y_hi) - math.log10(y_lo)) * (height - 2 * margin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
           f'font-size="15" font-family="sans-serif">{title}</text>']
    # axes
    out.append(f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
               f'y2="{height - margin}" stroke="black"/>')
    out.append(f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
               f'y2="{height - margin}" stroke="black"/>')
    for t in _ticks(x_lo, x_hi):
        if x_lo <= t <= x_hi:
            out.append(f'<line x1="{sx(t):.1f}" y1="{height - margin}" '
                       f'x2="{sx(t):.1f}" y2="{height - margin + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(t):.1f}" y="{height - margin + 20}" '
                       f'text-anchor="middle" font-size="11" '
                       f'font-family="sans-serif">1e{int(math.log10(t))}</text>')
    for t in _ticks(y_lo, y_hi):
        if y_lo <= t <= y_hi:
            out.append(f'<line x1="{margin - 5}" y1="{sy(t):.1f}" '
                       f'x2="{margin}" y2="{sy(t):.1f}" stroke="black"/>')
            out.append(f'<text x="{margin - 8}" y="{sy(t):.1f}" '
                       f'text-anchor="end" font-size="11" '
                       f'font-family="sans-serif">1e{int(math.log10(t))}</text>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
               f'font-size="12" font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="18" y="{height / 2:.0f}" text-anchor="middle" '
               f'font-size="12" font-family="sans-serif" '
               f'transform="rotate(-90 18 {height / 2:.0f})">{ylabel}</text>')
    for k, (name, ys) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        pts = [(sx(x), sy(y)) for x, y in zip(xs, ys) if x > 0.0 and y > 0.0]
        if not pts:
            continue
        path_d = " ".join(f"{px:.1f},{py:.1f}" for px, py in pts)
        out.append(f'<polyline points="{path_d}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')
        for px, py in pts:
            out.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3" fill="{color}"/>')
        out.append(f'<text x="{width - margin + 6}" y="{margin + 16 * k}" '
                   f'font-size="11" fill="{color}" '
                   f'font-family="sans-serif">{name}</text>')
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
