"""Core graph and layout data types, plus expanded-graph construction.

Every node carries an axis-aligned label box stored as *half* extents.
Expanding a graph replaces each labeled edge {i, j} by a fresh label node
k plus the two edges {i, k} and {k, j}; unlabeled edges pass through
unchanged. Layouts are plain ``(n, 2)`` float arrays indexed like the
node list of whichever graph is active.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GraphInputError

# A layout is an (n, 2) float64 array; row i holds the coordinates of node i.
Layout = np.ndarray

LABEL_NODE_PREFIX = "__elabel"

# Labels of parallel edges are seeded off the shared midpoint by this
# fraction of the edge length, perpendicular to the edge, alternating sides.
MULTIEDGE_JITTER = 1e-3


@dataclass(frozen=True)
class NodeLabel:
    """A node with its display text and label-box half extents."""

    id: str
    text: str
    half_width: float
    half_height: float

    def __post_init__(self) -> None:
        if not (self.half_width > 0 and self.half_height > 0):
            raise GraphInputError(
                f"node {self.id!r}: label box extents must be positive"
            )


@dataclass(frozen=True)
class EdgeLabel:
    """Text and half extents of an edge label box."""

    text: str
    half_width: float
    half_height: float

    def __post_init__(self) -> None:
        if not (self.half_width > 0 and self.half_height > 0):
            raise GraphInputError(
                f"edge label {self.text!r}: label box extents must be positive"
            )


@dataclass(frozen=True)
class EdgeRecord:
    """An undirected edge, optionally labeled and color-tagged."""

    source: str
    target: str
    label: Optional[EdgeLabel] = None
    color_tag: Optional[str] = None


@dataclass
class LabeledGraph:
    """An undirected graph with labeled nodes and optionally labeled edges.

    Node ids must be unique, edge endpoints must exist, and self-loops are
    rejected (the midpoint of a self-loop's endpoints degenerates, so the
    machinery downstream never handles them). Multi-edges are permitted.
    """

    nodes: list[NodeLabel]
    edges: list[EdgeRecord]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.nodes) < 1:
            raise GraphInputError("graph must contain at least one node")
        index: dict[str, int] = {}
        for pos, node in enumerate(self.nodes):
            if node.id in index:
                raise GraphInputError(f"duplicate node id {node.id!r}")
            index[node.id] = pos
        for edge in self.edges:
            if edge.source not in index:
                raise GraphInputError(f"edge references unknown node {edge.source!r}")
            if edge.target not in index:
                raise GraphInputError(f"edge references unknown node {edge.target!r}")
            if edge.source == edge.target:
                raise GraphInputError(f"self-loop on node {edge.source!r} not supported")
        self._index = index

    def node_index(self, node_id: str) -> int:
        return self._index[node_id]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def half_extent_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Half widths and half heights as parallel float arrays."""
        w = np.array([n.half_width for n in self.nodes], dtype=float)
        h = np.array([n.half_height for n in self.nodes], dtype=float)
        return w, h


@dataclass
class ExpandedGraph:
    """A graph whose labeled edges have been split through label nodes.

    ``all_nodes`` lists the original nodes first (indices ``0..n_original-1``)
    followed by one label node per labeled edge, in edge order. ``edges``
    holds index pairs: each labeled original edge contributes (i, k) and
    (k, j); unlabeled originals appear unchanged. ``label_origin`` maps each
    label-node index k to its parent pair (i, j).
    """

    all_nodes: list[NodeLabel]
    edges: list[tuple[int, int]]
    edge_color_tags: list[Optional[str]]
    label_origin: dict[int, tuple[int, int]]
    n_original: int

    def is_label_node(self, idx: int) -> bool:
        return idx >= self.n_original

    @property
    def n_nodes(self) -> int:
        return len(self.all_nodes)

    @property
    def label_node_indices(self) -> range:
        return range(self.n_original, len(self.all_nodes))

    def half_extent_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        w = np.array([n.half_width for n in self.all_nodes], dtype=float)
        h = np.array([n.half_height for n in self.all_nodes], dtype=float)
        return w, h


def as_layout(positions, n_nodes: int) -> Layout:
    """Validate and normalize a positions array for an n-node graph."""
    x = np.asarray(positions, dtype=float)
    if x.shape != (n_nodes, 2):
        raise GraphInputError(
            f"layout shape {x.shape} does not match node count {n_nodes}"
        )
    if not np.all(np.isfinite(x)):
        raise GraphInputError("layout contains non-finite coordinates")
    return x


def expand_graph(g: LabeledGraph) -> ExpandedGraph:
    """Split every labeled edge of ``g`` through a fresh label node.

    Label nodes get deterministic synthetic ids so repeated expansion of
    the same graph is reproducible. A graph with no labeled edges expands
    to an isomorphic copy of itself.
    """
    all_nodes = list(g.nodes)
    taken_ids = {n.id for n in g.nodes}
    edges: list[tuple[int, int]] = []
    colors: list[Optional[str]] = []
    label_origin: dict[int, tuple[int, int]] = {}

    ordinal = 0
    for edge in g.edges:
        i = g.node_index(edge.source)
        j = g.node_index(edge.target)
        if i == j:
            raise GraphInputError(f"self-loop on node {edge.source!r} not supported")
        if edge.label is None:
            edges.append((i, j))
            colors.append(edge.color_tag)
            continue
        synthetic = f"{LABEL_NODE_PREFIX}_{edge.source}_{edge.target}_{ordinal}"
        while synthetic in taken_ids:
            synthetic += "_x"
        taken_ids.add(synthetic)
        k = len(all_nodes)
        all_nodes.append(
            NodeLabel(
                id=synthetic,
                text=edge.label.text,
                half_width=edge.label.half_width,
                half_height=edge.label.half_height,
            )
        )
        edges.append((i, k))
        edges.append((k, j))
        colors.append(edge.color_tag)
        colors.append(edge.color_tag)
        label_origin[k] = (i, j)
        ordinal += 1

    return ExpandedGraph(
        all_nodes=all_nodes,
        edges=edges,
        edge_color_tags=colors,
        label_origin=label_origin,
        n_original=len(g.nodes),
    )


def seed_label_positions(g: ExpandedGraph, base: Layout) -> Layout:
    """Extend a layout of the original nodes to cover the label nodes.

    Each label node starts at the midpoint of its parents. Labels of
    parallel edges between the same node pair are offset perpendicular to
    the edge by ``MULTIEDGE_JITTER`` times the edge length, alternating
    sides with growing magnitude, so no two start coincident.
    """
    base = as_layout(base, g.n_original)
    out = np.zeros((g.n_nodes, 2), dtype=float)
    out[: g.n_original] = base

    if g.n_original > 1:
        spans = base.max(axis=0) - base.min(axis=0)
        bbox_diag = float(math.hypot(spans[0], spans[1]))
    else:
        bbox_diag = 0.0

    # Group label nodes by unordered parent pair to detect parallel edges.
    groups: dict[tuple[int, int], list[int]] = {}
    for k in g.label_node_indices:
        i, j = g.label_origin[k]
        groups.setdefault((min(i, j), max(i, j)), []).append(k)

    for ks in groups.values():
        for m, k in enumerate(sorted(ks)):
            i, j = g.label_origin[k]
            mid = 0.5 * (base[i] + base[j])
            if len(ks) == 1:
                out[k] = mid
                continue
            d = base[j] - base[i]
            length = float(math.hypot(d[0], d[1]))
            if length > 0.0:
                perp = np.array([-d[1], d[0]]) / length
                delta = MULTIEDGE_JITTER * length
            else:
                perp = np.array([1.0, 0.0])
                delta = MULTIEDGE_JITTER * max(bbox_diag, 1.0)
            magnitude = (m // 2) + 1
            sign = 1.0 if m % 2 == 0 else -1.0
            out[k] = mid + perp * (sign * magnitude * delta)
    return out
