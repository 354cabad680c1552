"""SVG rendering of expanded graphs: boxes, centered text, bent edges.

Each originally-labeled edge is drawn as a polyline through its label
node; unlabeled edges are straight segments. The y axis is flipped so
larger layout y means higher on the canvas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional
from xml.sax.saxutils import escape

import numpy as np

from .model import ExpandedGraph, Layout, as_layout

DEFAULT_PALETTE: dict[str, str] = {
    "summer": "#d3572e",
    "warm": "#d3572e",
    "winter": "#3a6fb0",
    "cool": "#3a6fb0",
    "red": "#c62828",
    "green": "#2e7d32",
    "blue": "#1565c0",
    "orange": "#ef6c00",
    "purple": "#6a1b9a",
}


@dataclass(frozen=True)
class RenderStyle:
    node_fill: str = "#fffbe8"
    node_stroke: str = "#444444"
    edge_label_fill: str = "#eef3fb"
    font_size: float = 12.0
    edge_width: float = 1.4
    palette: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    default_edge_color: str = "#666666"
    margin: float = 24.0

    def edge_color(self, tag: Optional[str]) -> str:
        if tag is None:
            return self.default_edge_color
        if tag in self.palette:
            return self.palette[tag]
        if tag.startswith("#"):
            return tag
        return self.default_edge_color


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def svg_document(g: ExpandedGraph, x: Layout, style: RenderStyle | None = None) -> str:
    """Build the SVG text for an expanded graph and its layout."""
    if style is None:
        style = RenderStyle()
    n = g.n_nodes
    if n > 0:
        x = as_layout(x, n)
        w, h = g.half_extent_arrays()
        xmin = float(np.min(x[:, 0] - w))
        xmax = float(np.max(x[:, 0] + w))
        ymin = float(np.min(x[:, 1] - h))
        ymax = float(np.max(x[:, 1] + h))
    else:
        xmin = xmax = ymin = ymax = 0.0

    m = style.margin
    width = (xmax - xmin) + 2 * m
    height = (ymax - ymin) + 2 * m

    def sx(v: float) -> float:
        return (v - xmin) + m

    def sy(v: float) -> float:
        return (ymax - v) + m

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]

    # Edges under the boxes. Labeled originals become one polyline each;
    # the remaining edges (touching no label node) are straight segments.
    color_by_edge = dict(zip(g.edges, g.edge_color_tags))
    for k in sorted(g.label_origin):
        i, j = g.label_origin[k]
        color = style.edge_color(color_by_edge.get((i, k), color_by_edge.get((k, j))))
        pts = " ".join(f"{_fmt(sx(x[p, 0]))},{_fmt(sy(x[p, 1]))}" for p in (i, k, j))
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(style.edge_width)}"/>'
        )
    for (u, v), tag in zip(g.edges, g.edge_color_tags):
        if g.is_label_node(u) or g.is_label_node(v):
            continue
        color = style.edge_color(tag)
        lines.append(
            f'<line x1="{_fmt(sx(x[u, 0]))}" y1="{_fmt(sy(x[u, 1]))}" '
            f'x2="{_fmt(sx(x[v, 0]))}" y2="{_fmt(sy(x[v, 1]))}" '
            f'stroke="{color}" stroke-width="{_fmt(style.edge_width)}"/>'
        )

    for idx, node in enumerate(g.all_nodes):
        fill = style.edge_label_fill if g.is_label_node(idx) else style.node_fill
        bx = sx(x[idx, 0] - node.half_width)
        by = sy(x[idx, 1] + node.half_height)
        lines.append(
            f'<rect x="{_fmt(bx)}" y="{_fmt(by)}" '
            f'width="{_fmt(2 * node.half_width)}" height="{_fmt(2 * node.half_height)}" '
            f'fill="{fill}" stroke="{style.node_stroke}"/>'
        )
        lines.append(
            f'<text x="{_fmt(sx(x[idx, 0]))}" y="{_fmt(sy(x[idx, 1]))}" '
            f'font-size="{_fmt(style.font_size)}" text-anchor="middle" '
            f'dominant-baseline="central">{escape(node.text)}</text>'
        )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(g: ExpandedGraph, x: Layout, style: RenderStyle | None = None, path=None) -> str:
    """Render to SVG text, writing it to ``path`` when given."""
    svg = svg_document(g, x, style)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg
