"""Static SVG 1.1 figures written by hand: trajectories, metric series, comparison bars."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .engine import SimTrace

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


def _num(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


class _Doc:
    def __init__(self, width: int, height: int):
        self.w, self.h = width, height
        self.parts: list[str] = []

    def add(self, s: str) -> None:
        self.parts.append(s)

    def text(self, x, y, s, size=12, anchor="middle", **extra) -> None:
        attrs = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in extra.items())
        self.add(f'<text x="{_num(x)}" y="{_num(y)}" font-size="{size}" '
                 f'text-anchor="{anchor}" font-family="sans-serif"{attrs}>{escape(s)}</text>')

    def polyline(self, pts, color, width=1.5, closed=False, fill="none") -> None:
        tag = "polygon" if closed else "polyline"
        d = " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)
        self.add(f'<{tag} points="{d}" fill="{fill}" stroke="{color}" stroke-width="{width}"/>')

    def render(self) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.w}" height="{self.h}" viewBox="0 0 {self.w} {self.h}">\n'
                f'<rect width="100%" height="100%" fill="white"/>\n')
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def trajectories_svg(trace: SimTrace, size: int = 560) -> str:
    cfg = trace.config
    verts = cfg.polygon.vertices
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    pad = 30
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    scale = (size - 2 * pad) / span

    def tf(p):
        return pad + (p[0] - min(xs)) * scale, size - pad - (p[1] - min(ys)) * scale

    doc = _Doc(size, size)
    doc.polyline([tf(v) for v in verts], "black", 2.0, closed=True)
    doc.polyline([tf(r.target) for r in trace.records], "#444444", 1.0)
    n = cfg.n_robots
    for i in range(n):
        color = PALETTE[i % len(PALETTE)]
        doc.polyline([tf(r.positions[i]) for r in trace.records], color, 2.0)
        for r in trace.records:
            if r.triggered[i] and cfg.strategy != "constant":
                x, y = tf(r.positions[i])
                doc.add(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="2.5" fill="none" stroke="{color}"/>')
        x0, y0 = tf(trace.records[0].positions[i])
        x1, y1 = tf(trace.records[-1].positions[i])
        doc.add(f'<rect x="{_num(x0 - 3)}" y="{_num(y0 - 3)}" width="6" height="6" fill="{color}"/>')
        doc.add(f'<circle cx="{_num(x1)}" cy="{_num(y1)}" r="5" fill="{color}"/>')
        doc.text(x1, y1 - 8, f"r{i + 1}", 11)
    tx, ty = tf(trace.records[-1].target)
    doc.add(f'<circle cx="{_num(tx)}" cy="{_num(ty)}" r="5" fill="black"/>')
    doc.text(size / 2, 18, f"{cfg.strategy}, {cfg.estimator}, seed {cfg.seed}", 13)
    return doc.render()


def series_svg(series: Mapping[str, Sequence[float]], title: str, ylabel: str,
               dt: float | None = None, threshold: float | None = None,
               width: int = 640, height: int = 360) -> str:
    """Line chart of one or more series against the step index (or time if ``dt``)."""
    doc = _Doc(width, height)
    left, right, top, bottom = 60, 20, 30, 45
    pw, ph = width - left - right, height - top - bottom
    n_max = max((len(s) for s in series.values()), default=1)
    xmax = max(n_max - 1, 1) * (dt or 1.0)
    vals = [v for s in series.values() for v in s if math.isfinite(v)]
    ymax = max(vals + ([threshold] if threshold else []) + [1e-12])
    ymin = min(vals + [0.0])

    def tf(x, y):
        return left + x / xmax * pw, top + ph - (y - ymin) / (ymax - ymin) * ph

    doc.add(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(ymin, ymax):
        _, y = tf(0, t)
        doc.text(left - 6, y + 4, f"{t:g}", 10, "end")
    for t in _ticks(0, xmax):
        x, _ = tf(t, ymin)
        doc.text(x, top + ph + 16, f"{t:g}", 10)
    if threshold is not None:
        _, y = tf(0, threshold)
        doc.add(f'<line x1="{left}" y1="{_num(y)}" x2="{left + pw}" y2="{_num(y)}" '
                f'stroke="#888888" stroke-dasharray="5,4"/>')
    for j, (name, s) in enumerate(series.items()):
        color = PALETTE[j % len(PALETTE)]
        stride = max(1, len(s) // 2000)
        pts = [tf(k * (dt or 1.0), v) for k, v in enumerate(s) if k % stride == 0 and math.isfinite(v)]
        doc.polyline(pts, color, 1.5)
        doc.text(left + pw - 8, top + 16 + 14 * j, name, 11, "end", fill=color)
    doc.text(width / 2, 18, title, 13)
    doc.text(width / 2, height - 8, "time [s]" if dt else "step", 11)
    doc.text(14, top + ph / 2, ylabel, 11, transform=f"rotate(-90 14 {_num(top + ph / 2)})")
    return doc.render()


def bars_svg(labels: Sequence[str], means: Sequence[float], stds: Sequence[float],
             title: str, ylabel: str, width: int = 480, height: int = 360) -> str:
    """Bar chart with standard-deviation error bars."""
    doc = _Doc(width, height)
    left, right, top, bottom = 60, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    ymax = max([m + s for m, s in zip(means, stds)] + [1e-12]) * 1.1

    def y_of(v):
        return top + ph - v / ymax * ph

    doc.add(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(0, ymax):
        doc.text(left - 6, y_of(t) + 4, f"{t:g}", 10, "end")
    k = max(len(labels), 1)
    slot = pw / k
    for j, (lab, m, s) in enumerate(zip(labels, means, stds)):
        cx = left + slot * (j + 0.5)
        bw = slot * 0.5
        doc.add(f'<rect x="{_num(cx - bw / 2)}" y="{_num(y_of(m))}" width="{_num(bw)}" '
                f'height="{_num(y_of(0) - y_of(m))}" fill="{PALETTE[j % len(PALETTE)]}"/>')
        lo, hi = y_of(max(m - s, 0.0)), y_of(m + s)
        doc.add(f'<line x1="{_num(cx)}" y1="{_num(lo)}" x2="{_num(cx)}" y2="{_num(hi)}" stroke="black"/>')
        for yy in (lo, hi):
            doc.add(f'<line x1="{_num(cx - 6)}" y1="{_num(yy)}" x2="{_num(cx + 6)}" y2="{_num(yy)}" stroke="black"/>')
        doc.text(cx, top + ph + 18, lab, 11)
    doc.text(width / 2, 18, title, 13)
    doc.text(14, top + ph / 2, ylabel, 11, transform=f"rotate(-90 14 {_num(top + ph / 2)})")
    return doc.render()


def write_svg(text: str, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(text)
    return path
