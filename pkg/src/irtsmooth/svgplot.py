"""Static SVG chart emission.

Pure-string SVG generation with fixed 6-decimal coordinates and stable
element ordering, so a given input always produces byte-identical output.
No graphics dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (TETRAHEDRON_VERTICES, TRIANGLE_VERTICES,
                       PcaSummary, SimplexTrajectory)

WIDTH = 640
HEIGHT = 460
MARGIN_LEFT = 62
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 52

KEYED_COLOR = "#1f4fd6"      # highlighted (correct) option
OTHER_COLOR = "#d62728"      # remaining options
GUIDE_COLOR = "#888888"
BAND_COLORS = {"low": "#d62728", "medium": "#2ca02c", "high": "#1f4fd6"}
GROUP_PALETTE = ("#1f4fd6", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#8c564b", "#17becf", "#e377c2")


def fmt(x: float) -> str:
    """Fixed-precision coordinate formatting (6 decimals)."""
    v = float(x)
    if not math.isfinite(v):
        raise ValueError(f"non-finite coordinate {v!r}")
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] at a 1/2/5 step."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if mag * mult >= raw:
            step = mag * mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


@dataclass
class Canvas:
    """Accumulates SVG elements in emission order."""

    width: int = WIDTH
    height: int = HEIGHT
    elements: list[str] = field(default_factory=list)

    def line(self, x1, y1, x2, y2, color="#000000", width=1.0, dashed=False):
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        self.elements.append(
            f'<line x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" '
            f'stroke="{color}" stroke-width="{fmt(width)}"{dash} />')

    def polyline(self, xs, ys, color="#000000", width=1.5, dashed=False):
        pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{fmt(width)}"{dash} />')

    def circle(self, x, y, r=2.5, color="#000000"):
        self.elements.append(
            f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="{fmt(r)}" fill="{color}" />')

    def text(self, x, y, content, size=12, anchor="middle", color="#000000"):
        self.elements.append(
            f'<text x="{fmt(x)}" y="{fmt(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{color}">{_esc(content)}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        body = "\n".join(self.elements)
        return f"{head}\n{body}\n</svg>\n"


class Frame:
    """Data-to-pixel mapping plus axis rendering for one chart."""

    def __init__(self, canvas: Canvas, x_range, y_range):
        self.canvas = canvas
        lo_x, hi_x = float(x_range[0]), float(x_range[1])
        lo_y, hi_y = float(y_range[0]), float(y_range[1])
        if hi_x <= lo_x:
            hi_x = lo_x + 1.0
        if hi_y <= lo_y:
            hi_y = lo_y + 1.0
        pad_x = 0.02 * (hi_x - lo_x)
        pad_y = 0.04 * (hi_y - lo_y)
        self.x0, self.x1 = lo_x - pad_x, hi_x + pad_x
        self.y0, self.y1 = lo_y - pad_y, hi_y + pad_y
        self.left = MARGIN_LEFT
        self.right = canvas.width - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = canvas.height - MARGIN_BOTTOM

    def px(self, x) -> float:
        frac = (float(x) - self.x0) / (self.x1 - self.x0)
        return self.left + frac * (self.right - self.left)

    def py(self, y) -> float:
        frac = (float(y) - self.y0) / (self.y1 - self.y0)
        return self.bottom - frac * (self.bottom - self.top)

    def axes(self, title: str, xlabel: str, ylabel: str):
        c = self.canvas
        c.line(self.left, self.bottom, self.right, self.bottom)
        c.line(self.left, self.bottom, self.left, self.top)
        for t in nice_ticks(self.x0, self.x1):
            x = self.px(t)
            c.line(x, self.bottom, x, self.bottom + 4)
            c.text(x, self.bottom + 17, _tick_label(t), size=10)
        for t in nice_ticks(self.y0, self.y1):
            y = self.py(t)
            c.line(self.left - 4, y, self.left, y)
            c.text(self.left - 7, y + 3, _tick_label(t), size=10, anchor="end")
        c.text((self.left + self.right) / 2, c.height - 14, xlabel, size=12)
        c.text(16, (self.top + self.bottom) / 2, ylabel, size=12)
        c.text((self.left + self.right) / 2, 22, title, size=14)

    def vline(self, x, color=GUIDE_COLOR, dashed=True):
        self.canvas.line(self.px(x), self.bottom, self.px(x), self.top,
                         color=color, dashed=dashed)

    def hline(self, y, color=GUIDE_COLOR, dashed=True):
        self.canvas.line(self.left, self.py(y), self.right, self.py(y),
                         color=color, dashed=dashed)


@dataclass(frozen=True)
class Series:
    """One curve: y values over the shared x, with its drawing style."""

    y: np.ndarray
    color: str = "#000000"
    dashed: bool = False
    label: str = ""
    width: float = 1.5


def curve_chart(title: str, xlabel: str, ylabel: str, x: np.ndarray,
                series: list[Series], points: list[tuple[float, float, str]] = (),
                vlines: list[float] = (), hlines: list[float] = (),
                y_range: tuple[float, float] | None = None,
                diagonal: bool = False) -> str:
    """Generic line chart shared by the curve-style plot kinds."""
    x = np.asarray(x, dtype=np.float64)
    ys = [np.asarray(s.y, dtype=np.float64) for s in series]
    if y_range is None:
        stacked = np.concatenate([y for y in ys]) if ys else np.array([0.0, 1.0])
        if points:
            stacked = np.concatenate([stacked, [p[1] for p in points]])
        y_range = (float(stacked.min()), float(stacked.max()))
    canvas = Canvas()
    frame = Frame(canvas, (x.min(), x.max()), y_range)
    frame.axes(title, xlabel, ylabel)
    for v in vlines:
        frame.vline(v)
    for hline in hlines:
        frame.hline(hline)
    if diagonal:
        lo = max(frame.x0, frame.y0)
        hi = min(frame.x1, frame.y1)
        canvas.line(frame.px(lo), frame.py(lo), frame.px(hi), frame.py(hi),
                    color=GUIDE_COLOR, dashed=True)
    for s, y in zip(series, ys):
        canvas.polyline([frame.px(v) for v in x], [frame.py(v) for v in y],
                        color=s.color, dashed=s.dashed, width=s.width)
    for px_val, py_val, color in points:
        canvas.circle(frame.px(px_val), frame.py(py_val), color=color)
    legend_y = MARGIN_TOP + 4
    for s in series:
        if s.label:
            canvas.line(frame.right - 110, legend_y, frame.right - 90, legend_y,
                        color=s.color, width=2.0, dashed=s.dashed)
            canvas.text(frame.right - 84, legend_y + 4, s.label, size=10,
                        anchor="start")
            legend_y += 14
    return canvas.render()


def scatter_chart(title: str, xlabel: str, ylabel: str,
                  points: list[tuple[float, float, str, str]],
                  diagonal: bool = False,
                  vlines: list[float] = (), hlines: list[float] = ()) -> str:
    """Scatter chart with per-point text labels (PCA, QQ plots)."""
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    canvas = Canvas()
    frame = Frame(canvas, (xs.min(), xs.max()), (ys.min(), ys.max()))
    frame.axes(title, xlabel, ylabel)
    for v in vlines:
        frame.vline(v)
    for h in hlines:
        frame.hline(h)
    if diagonal:
        lo = max(frame.x0, frame.y0)
        hi = min(frame.x1, frame.y1)
        canvas.line(frame.px(lo), frame.py(lo), frame.px(hi), frame.py(hi),
                    color=GUIDE_COLOR, dashed=True)
    for x, y, label, color in points:
        canvas.circle(frame.px(x), frame.py(y), color=color)
        if label:
            canvas.text(frame.px(x) + 5, frame.py(y) - 4, label, size=9,
                        anchor="start")
    return canvas.render()


def simplex_triangle_chart(traj: SimplexTrajectory, title: str) -> str:
    """Trajectory inside the reference triangle, colored by trait band."""
    canvas = Canvas()
    verts = TRIANGLE_VERTICES
    frame = Frame(canvas, (verts[:, 0].min(), verts[:, 0].max()),
                  (verts[:, 1].min() - 0.08, verts[:, 1].max() + 0.08))
    canvas.text((frame.left + frame.right) / 2, 22, title, size=14)
    edges = [(0, 1), (1, 2), (2, 0)]
    for a, b in edges:
        canvas.line(frame.px(verts[a, 0]), frame.py(verts[a, 1]),
                    frame.px(verts[b, 0]), frame.py(verts[b, 1]))
    offsets = [(0, 14), (0, 14), (0, -8)]
    for v, (dx, dy) in zip(range(3), offsets):
        canvas.text(frame.px(verts[v, 0]) + dx, frame.py(verts[v, 1]) + dy,
                    f"option {traj.vertex_options[v]}", size=11)
    xs = [frame.px(v) for v in traj.cartesian[:, 0]]
    ys = [frame.py(v) for v in traj.cartesian[:, 1]]
    canvas.polyline(xs, ys, color="#bbbbbb", width=1.0)
    for x, y, band in zip(xs, ys, traj.trait_band):
        canvas.circle(x, y, r=3.0, color=BAND_COLORS[band])
    return canvas.render()


def _isometric(xyz: np.ndarray) -> np.ndarray:
    """Fixed isometric camera: 3-d points to the drawing plane."""
    c30, s30 = math.cos(math.pi / 6), math.sin(math.pi / 6)
    x = (xyz[:, 0] - xyz[:, 1]) * c30
    y = (xyz[:, 0] + xyz[:, 1]) * s30 - xyz[:, 2]
    return np.column_stack([x, y])


def simplex_tetrahedron_chart(traj: SimplexTrajectory, title: str) -> str:
    """Static isometric projection of the tetrahedron trajectory."""
    canvas = Canvas()
    verts2 = _isometric(TETRAHEDRON_VERTICES)
    pts2 = _isometric(traj.cartesian)
    all_pts = np.vstack([verts2, pts2])
    frame = Frame(canvas, (all_pts[:, 0].min() - 0.1, all_pts[:, 0].max() + 0.1),
                  (all_pts[:, 1].min() - 0.1, all_pts[:, 1].max() + 0.1))
    canvas.text((frame.left + frame.right) / 2, 22, title, size=14)
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for a, b in edges:
        canvas.line(frame.px(verts2[a, 0]), frame.py(verts2[a, 1]),
                    frame.px(verts2[b, 0]), frame.py(verts2[b, 1]),
                    color="#999999")
    for v in range(4):
        canvas.text(frame.px(verts2[v, 0]), frame.py(verts2[v, 1]) - 6,
                    f"option {traj.vertex_options[v]}", size=11)
    xs = [frame.px(v) for v in pts2[:, 0]]
    ys = [frame.py(v) for v in pts2[:, 1]]
    canvas.polyline(xs, ys, color="#bbbbbb", width=1.0)
    for x, y, band in zip(xs, ys, traj.trait_band):
        canvas.circle(x, y, r=3.0, color=BAND_COLORS[band])
    return canvas.render()


def pca_chart(summary: PcaSummary, labels: list[str], title: str) -> str:
    points = [(float(summary.scores[j, 0]), float(summary.scores[j, 1]),
               labels[j], "#1f4fd6") for j in range(summary.scores.shape[0])]
    return scatter_chart(title, "component 1 (difficulty)",
                         "component 2 (discrimination)", points,
                         vlines=[0.0], hlines=[0.0])
