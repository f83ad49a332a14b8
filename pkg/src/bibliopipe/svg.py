"""Deterministic SVG 1.1 renderers for the heatmaps, cluster scatter and author network."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

# viridis, dark to light; CIE L* increases monotonically along the ramp
VIRIDIS = (
    "#440154", "#472d7b", "#3b528b", "#2c728e", "#21918c",
    "#28ae80", "#5ec962", "#addc30", "#fde725",
)
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#7f7f7f",
)
NOISE_COLOR = "#b0b0b0"


@dataclass(frozen=True)
class Style:
    cell_w: int = 36
    cell_h: int = 18
    font_size: int = 11
    char_w: float = 6.6
    font: str = "DejaVu Sans, Arial, sans-serif"
    ramp: tuple[str, ...] = VIRIDIS
    palette: tuple[str, ...] = PALETTE
    width: int = 720
    height: int = 540


DEFAULT_STYLE = Style()


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    c = color.lstrip("#")
    return int(c[0:2], 16), int(c[2:4], 16), int(c[4:6], 16)


RAMP_LEVELS = 64


def _interp(t: float, ramp: Sequence[str]) -> str:
    pos = t * (len(ramp) - 1)
    i = min(int(pos), len(ramp) - 2)
    f = pos - i
    a, b = _hex_to_rgb(ramp[i]), _hex_to_rgb(ramp[i + 1])
    rgb = (int(round(x + (y - x) * f)) for x, y in zip(a, b))
    return "#%02x%02x%02x" % tuple(rgb)


def ramp_color(t: float, ramp: Sequence[str] = VIRIDIS, levels: int = RAMP_LEVELS) -> str:
    """Color for ``t`` in [0, 1], quantized to ``levels`` steps along ``ramp``.

    Quantizing keeps lightness strictly increasing from step to step; plain
    interpolation wobbles by a fraction of an L* unit after rounding to 8 bits.
    """
    t = min(max(float(t), 0.0), 1.0)
    step = int(t * (levels - 1) + 0.5)
    return _interp(step / (levels - 1), ramp)


def lightness(color: str) -> float:
    """CIE L* of an sRGB hex color."""

    def lin(v: float) -> float:
        v /= 255.0
        return v / 12.92 if v <= 0.04045 else ((v + 0.055) / 1.055) ** 2.4

    r, g, b = (lin(v) for v in _hex_to_rgb(color))
    y = 0.2126 * r + 0.7152 * g + 0.0722 * b
    return 116 * y ** (1 / 3) - 16 if y > 216 / 24389 else y * 24389 / 27


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Doc:
    def __init__(self, width: float, height: float, style: Style):
        self.style = style
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" '
            f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}" '
            f'font-family={quoteattr(style.font)} font-size="{style.font_size}">',
            f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="#ffffff"/>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x: float, y: float, s: str, anchor: str = "start", extra: str = "") -> None:
        self.add(
            f'<text x="{_num(x)}" y="{_num(y)}" text-anchor="{anchor}"{extra}>{escape(s)}</text>'
        )

    def bytes(self) -> bytes:
        return ("\n".join(self.parts + ["</svg>"]) + "\n").encode("utf-8")


def cell_fills(values: np.ndarray, ramp: Sequence[str] = VIRIDIS) -> list[list[str]]:
    """Fill color per cell, min value darkest; a constant table is drawn at full lightness."""
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin
    return [[ramp_color((v - vmin) / span if span > 0 else 1.0, ramp) for v in row] for row in values]


def render_heatmap_svg(table, style: Style = DEFAULT_STYLE) -> bytes:
    values = np.asarray(table.values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty table")
    nrows, ncols = values.shape
    fills = cell_fills(values, style.ramp)
    left = 12 + style.char_w * max(len(r) for r in table.row_labels)
    top = 34 if table.title else 12
    bottom = 16 + style.char_w * max(len(c) for c in table.col_labels) * 0.75
    grid_w, grid_h = ncols * style.cell_w, nrows * style.cell_h
    bar_x = left + grid_w + 16
    width = bar_x + 70
    height = max(top + grid_h + bottom, top + 120)
    doc = _Doc(width, height, style)
    if table.title:
        doc.text(width / 2, 20, table.title, "middle", ' font-weight="bold"')
    for i, label in enumerate(table.row_labels):
        y = top + i * style.cell_h
        doc.text(left - 6, y + style.cell_h * 0.7, label, "end")
        for j in range(ncols):
            doc.add(
                f'<rect x="{_num(left + j * style.cell_w)}" y="{_num(y)}" width="{style.cell_w}" '
                f'height="{style.cell_h}" fill="{fills[i][j]}"><title>{escape(label)} / '
                f"{escape(table.col_labels[j])}: {values[i, j]:.6g}</title></rect>"
            )
    for j, label in enumerate(table.col_labels):
        x = left + (j + 0.5) * style.cell_w
        y = top + grid_h + 10
        doc.text(x, y, label, "end", f' transform="rotate(-45 {_num(x)} {_num(y)})"')
    steps = 20
    bar_h = min(grid_h, 200) if grid_h >= 60 else 60
    for s in range(steps):
        color = ramp_color(1 - s / (steps - 1), style.ramp)
        doc.add(
            f'<rect x="{_num(bar_x)}" y="{_num(top + s * bar_h / steps)}" width="12" '
            f'height="{_num(bar_h / steps + 0.5)}" fill="{color}"/>'
        )
    doc.text(bar_x + 16, top + 9, f"{values.max():.3g}")
    doc.text(bar_x + 16, top + bar_h, f"{values.min():.3g}")
    return doc.bytes()


def _fit(coords: np.ndarray, box: tuple[float, float, float, float]) -> np.ndarray:
    """Map coordinates into (x0, y0, x1, y1) with preserved aspect ratio, y pointing up."""
    x0, y0, x1, y1 = box
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    scale = min((x1 - x0) / span[0] if span[0] > 0 else np.inf, (y1 - y0) / span[1] if span[1] > 0 else np.inf)
    if not np.isfinite(scale):
        scale = 1.0
    used = span * scale
    off = np.array([x0 + (x1 - x0 - used[0]) / 2, y0 + (y1 - y0 - used[1]) / 2])
    out = (coords - lo) * scale
    out[:, 1] = used[1] - out[:, 1]
    return out + off


def _legend(doc: _Doc, x: float, y: float, entries: Sequence[tuple[str, str]]) -> None:
    for i, (color, label) in enumerate(entries):
        ly = y + i * 18
        doc.add(f'<rect x="{_num(x)}" y="{_num(ly - 9)}" width="10" height="10" fill="{color}"/>')
        doc.text(x + 16, ly, label)


def render_scatter_svg(projection, result, legends: Mapping[int, Sequence[str]], style: Style = DEFAULT_STYLE,
                       title: str = "Clustered abstracts") -> bytes:
    if not projection.ids:
        raise ValueError("empty projection")
    if set(projection.ids) != set(result.ids) or len(projection.ids) != len(result.ids):
        raise ValueError("projection and cluster labels cover different documents")
    label = result.label_map
    clusters = sorted(set(label.values()) - {-1})
    color = {c: style.palette[i % len(style.palette)] for i, c in enumerate(clusters)}
    color[-1] = NOISE_COLOR
    n_legend = len(clusters) + (1 if -1 in label.values() else 0)
    legend_h = 18 * n_legend + 10
    width, height = style.width, style.height + legend_h
    doc = _Doc(width, height, style)
    doc.text(width / 2, 20, title, "middle", ' font-weight="bold"')
    pts = _fit(np.asarray(projection.coords, dtype=np.float64)[:, :2], (40, 40, width - 40, style.height - 20))
    doc.add(f'<rect x="30" y="30" width="{width - 60}" height="{style.height - 40}" fill="none" stroke="#cccccc"/>')
    for doc_id, (x, y) in zip(projection.ids, pts):
        doc.add(
            f'<circle cx="{_num(x)}" cy="{_num(y)}" r="3" fill="{color[label[doc_id]]}" '
            f'fill-opacity="0.8"><title>{escape(doc_id)}</title></circle>'
        )
    entries = [(color[c], f"Cluster {c}: " + ", ".join(legends.get(c, ()))) for c in clusters]
    if -1 in label.values():
        entries.append((NOISE_COLOR, "Noise"))
    _legend(doc, 40, style.height + 8, entries)
    return doc.bytes()


def render_network_svg(layout, graph, style: Style = DEFAULT_STYLE,
                       title: str = "Co-author networks") -> bytes:
    missing = [n for n in graph.nodes if n not in layout.positions]
    if missing:
        raise ValueError(f"no layout position for nodes: {missing[:5]}")
    comps = graph.components or [(frozenset(graph.nodes), frozenset())]
    comp_of = {n: i for i, (nodes, _) in enumerate(comps) for n in nodes}
    legend_h = 18 * len(comps) + 10
    width, height = style.width, style.height + legend_h
    doc = _Doc(width, height, style)
    doc.text(width / 2, 20, title, "middle", ' font-weight="bold"')
    if graph.nodes:
        coords = np.array([layout.positions[n] for n in graph.nodes], dtype=np.float64)
        pts = dict(zip(graph.nodes, _fit(coords, (60, 50, width - 60, style.height - 30))))
        wmax = max(e.weight for e in graph.edges) if graph.edges else 1
        for e in graph.edges:
            (xa, ya), (xb, yb) = pts[e.a], pts[e.b]
            doc.add(
                f'<line x1="{_num(xa)}" y1="{_num(ya)}" x2="{_num(xb)}" y2="{_num(yb)}" '
                f'stroke="#888888" stroke-width="{_num(1 + 3 * e.weight / wmax)}"/>'
            )
        for n in graph.nodes:
            x, y = pts[n]
            c = style.palette[comp_of.get(n, 0) % len(style.palette)]
            doc.add(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="6" fill="{c}" stroke="#333333"/>')
            doc.text(x + 8, y - 8, n)
    entries = []
    for i, (nodes, countries) in enumerate(comps):
        names = ", ".join(sorted(countries)) or "no country"
        entries.append((style.palette[i % len(style.palette)], f"Network {i + 1} ({len(nodes)} authors): {names}"))
    _legend(doc, 40, style.height + 8, entries)
    return doc.bytes()
