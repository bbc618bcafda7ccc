"""Minimal, dependency-free SVG charts.

Output is deterministic: fixed number formatting, no timestamps.  Each
document may carry a provenance comment (typically the resolved run
configuration).
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_plot", "heatmap", "scatter"]

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=90, top=30, bottom=50)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _f(x):
    return f"{x:.2f}"


def _viridis(t):
    # five-stop approximation of the viridis colour map
    stops = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]])
    t = float(np.clip(t, 0.0, 1.0)) * (len(stops) - 1)
    i = min(int(t), len(stops) - 2)
    c = stops[i] + (stops[i + 1] - stops[i]) * (t - i)
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


class _Frame:
    def __init__(self, xlim, ylim, logy=False):
        self.x0, self.x1 = xlim
        self.logy = logy
        y0, y1 = ylim
        if logy:
            y0, y1 = np.log10(y0), np.log10(y1)
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 0.5, self.x1 + 0.5
        self.y0, self.y1 = y0, y1
        self.w = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def x(self, v):
        return MARGIN["left"] + (v - self.x0) / (self.x1 - self.x0) * self.w

    def y(self, v):
        if self.logy:
            v = np.log10(v)
        return MARGIN["top"] + (1 - (v - self.y0) / (self.y1 - self.y0)) * self.h


def _document(body, title, xlabel, ylabel, comment):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if comment:
        parts.append("<!-- " + comment.replace("--", "- -") + " -->")
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    parts.extend(body)
    cx = MARGIN["left"] + (WIDTH - MARGIN["left"] - MARGIN["right"]) / 2
    parts.append(f'<text x="{_f(cx)}" y="18" text-anchor="middle">{escape(title)}</text>')
    parts.append(f'<text x="{_f(cx)}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    cy = MARGIN["top"] + (HEIGHT - MARGIN["top"] - MARGIN["bottom"]) / 2
    parts.append(f'<text x="16" y="{_f(cy)}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {_f(cy)})">{escape(ylabel)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _axes(fr, nticks=5):
    out = []
    l, t = MARGIN["left"], MARGIN["top"]
    out.append(f'<rect x="{l}" y="{t}" width="{fr.w}" height="{fr.h}" fill="none" stroke="black"/>')
    for v in np.linspace(fr.x0, fr.x1, nticks):
        x = fr.x(v)
        out.append(f'<line x1="{_f(x)}" y1="{t + fr.h}" x2="{_f(x)}" y2="{t + fr.h + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{t + fr.h + 18}" text-anchor="middle">{v:.4g}</text>')
    for v in np.linspace(fr.y0, fr.y1, nticks):
        label = 10 ** v if fr.logy else v
        y = MARGIN["top"] + (1 - (v - fr.y0) / (fr.y1 - fr.y0)) * fr.h
        out.append(f'<line x1="{l - 5}" y1="{_f(y)}" x2="{l}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{l - 8}" y="{_f(y + 4)}" text-anchor="end">{label:.3g}</text>')
    return out


def line_plot(series, title="", xlabel="", ylabel="", logy=False, comment=None):
    """Line chart.

    Parameters
    ----------
    series : list of (label, x, y)
    """
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, float) for _, _, y in series])
    if logy:
        ys = ys[ys > 0]
    fr = _Frame((xs.min(), xs.max()), (ys.min(), ys.max()), logy)
    body = _axes(fr)
    for k, (label, x, y) in enumerate(series):
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(y) & ((y > 0) if logy else True)
        pts = " ".join(f"{_f(fr.x(a))},{_f(fr.y(b))}" for a, b in zip(x[ok], y[ok]))
        color = PALETTE[k % len(PALETTE)]
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = MARGIN["top"] + 14 * (k + 1)
        body.append(f'<text x="{WIDTH - MARGIN["right"] + 6}" y="{ly}" fill="{color}">{escape(str(label))}</text>')
    return _document(body, title, xlabel, ylabel, comment)


def heatmap(grid, title="", xlabel="n", ylabel="m", comment=None, vmax=None):
    """Colour map of a 2D array; row 0 is drawn at the top."""
    g = np.asarray(grid, float)
    rows, cols = g.shape
    top = vmax if vmax is not None else (g.max() if g.max() > 0 else 1.0)
    fr = _Frame((0.5, cols + 0.5), (0.5, rows + 0.5))
    cw, ch = fr.w / cols, fr.h / rows
    body = []
    for i in range(rows):
        for j in range(cols):
            x = MARGIN["left"] + j * cw
            y = MARGIN["top"] + i * ch
            body.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(cw)}" height="{_f(ch)}" '
                        f'fill="{_viridis(g[i, j] / top)}"/>')
    l, t = MARGIN["left"], MARGIN["top"]
    body.append(f'<rect x="{l}" y="{t}" width="{fr.w}" height="{fr.h}" fill="none" stroke="black"/>')
    for j in (1, cols):
        body.append(f'<text x="{_f(l + (j - 0.5) * cw)}" y="{t + fr.h + 16}" text-anchor="middle">{j}</text>')
    for i in (1, rows):
        body.append(f'<text x="{l - 8}" y="{_f(t + (i - 0.5) * ch + 4)}" text-anchor="end">{i}</text>')
    body.extend(_colorbar(0.0, top))
    return _document(body, title, xlabel, ylabel, comment)


def _colorbar(lo, hi, steps=20):
    x = WIDTH - MARGIN["right"] + 20
    h = (HEIGHT - MARGIN["top"] - MARGIN["bottom"]) / steps
    out = []
    for k in range(steps):
        y = MARGIN["top"] + (steps - 1 - k) * h
        out.append(f'<rect x="{x}" y="{_f(y)}" width="14" height="{_f(h + 0.5)}" '
                   f'fill="{_viridis((k + 0.5) / steps)}"/>')
    out.append(f'<text x="{x + 18}" y="{MARGIN["top"] + 10}">{hi:.3g}</text>')
    out.append(f'<text x="{x + 18}" y="{HEIGHT - MARGIN["bottom"]}">{lo:.3g}</text>')
    return out


def scatter(x, y, c, title="", xlabel="", ylabel="", comment=None, size=2.0):
    """Scatter plot coloured by ``c`` (normalized to its maximum)."""
    x, y, c = (np.asarray(a, float) for a in (x, y, c))
    fr = _Frame((x.min(), x.max()), (y.min(), y.max()))
    body = _axes(fr)
    top = c.max() if c.size and c.max() > 0 else 1.0
    for order in np.argsort(c, kind="stable"):
        body.append(f'<circle cx="{_f(fr.x(x[order]))}" cy="{_f(fr.y(y[order]))}" r="{size}" '
                    f'fill="{_viridis(c[order] / top)}"/>')
    body.extend(_colorbar(0.0, top))
    return _document(body, title, xlabel, ylabel, comment)
