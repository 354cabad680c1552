"""Native JSON graph documents, layout persistence, and the trace CSV.

The document schema: ``format_version``, ``nodes`` with id/label/width/
height and optional x/y, ``edges`` with source/target and optional
label/label_width/label_height/color. Widths and heights in files are
full extents and are halved on ingestion. Unknown fields are ignored
with a warning so newer documents still load.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from .engine import IterationTrace
from .errors import GraphInputError
from .model import (
    EdgeLabel,
    EdgeRecord,
    ExpandedGraph,
    LabeledGraph,
    Layout,
    NodeLabel,
    as_layout,
)

FORMAT_VERSION = "1"

DEFAULT_BOX_HEIGHT = 36.0

_NODE_FIELDS = {"id", "label", "width", "height", "x", "y"}
_EDGE_FIELDS = {
    "source", "target", "label", "label_width", "label_height",
    "color", "label_x", "label_y",
}
_DOC_FIELDS = {"format_version", "nodes", "edges"}


def default_box_width(text: str) -> float:
    """Full box width approximating rendered text metrics."""
    return 18.0 * len(text) + 12.0


def _positive(value, what: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise GraphInputError(f"{what} is not a number: {value!r}") from None
    if not v > 0:
        raise GraphInputError(f"{what} must be positive, got {value!r}")
    return v


def _warn_unknown(fields, known, where: str) -> None:
    for key in fields:
        if key not in known:
            warnings.warn(f"ignoring unknown field {key!r} in {where}", stacklevel=3)


def graph_from_document(doc: dict) -> tuple[LabeledGraph, Optional[Layout]]:
    """Validate a parsed document and build the graph plus optional layout."""
    if not isinstance(doc, dict):
        raise GraphInputError("document root must be an object")
    _warn_unknown(doc, _DOC_FIELDS, "document")

    nodes = []
    coords = []
    have_all_coords = True
    for raw in doc.get("nodes", []):
        if not isinstance(raw, dict) or "id" not in raw:
            raise GraphInputError(f"node entry without id: {raw!r}")
        _warn_unknown(raw, _NODE_FIELDS, f"node {raw.get('id')!r}")
        node_id = str(raw["id"])
        text = str(raw.get("label", node_id))
        width = _positive(raw.get("width", default_box_width(text)), f"node {node_id!r} width")
        height = _positive(raw.get("height", DEFAULT_BOX_HEIGHT), f"node {node_id!r} height")
        nodes.append(NodeLabel(id=node_id, text=text, half_width=width / 2.0, half_height=height / 2.0))
        if "x" in raw and "y" in raw:
            try:
                coords.append((float(raw["x"]), float(raw["y"])))
            except (TypeError, ValueError):
                raise GraphInputError(f"node {node_id!r} has non-numeric coordinates") from None
        else:
            have_all_coords = False
            coords.append((0.0, 0.0))

    edges = []
    for raw in doc.get("edges", []):
        if not isinstance(raw, dict) or "source" not in raw or "target" not in raw:
            raise GraphInputError(f"edge entry without endpoints: {raw!r}")
        _warn_unknown(raw, _EDGE_FIELDS, f"edge {raw.get('source')!r}--{raw.get('target')!r}")
        label = None
        if raw.get("label") is not None:
            text = str(raw["label"])
            lw = _positive(raw.get("label_width", default_box_width(text)), "edge label width")
            lh = _positive(raw.get("label_height", DEFAULT_BOX_HEIGHT), "edge label height")
            label = EdgeLabel(text=text, half_width=lw / 2.0, half_height=lh / 2.0)
        color = raw.get("color")
        edges.append(
            EdgeRecord(
                source=str(raw["source"]),
                target=str(raw["target"]),
                label=label,
                color_tag=None if color is None else str(color),
            )
        )

    graph = LabeledGraph(nodes=nodes, edges=edges)
    layout = as_layout(np.array(coords), graph.n_nodes) if (have_all_coords and nodes) else None
    return graph, layout


def document_from_graph(
    g: LabeledGraph,
    x: Optional[Layout] = None,
    expanded: Optional[ExpandedGraph] = None,
    x_expanded: Optional[Layout] = None,
) -> dict:
    """Serialize a graph (and optionally its layout) back to a document.

    With ``expanded``/``x_expanded`` given, original nodes take their
    positions from the expanded layout and each labeled edge is annotated
    with its label node's position as label_x/label_y.
    """
    if expanded is not None and x_expanded is not None:
        x_expanded = as_layout(x_expanded, expanded.n_nodes)
        x = x_expanded[: expanded.n_original]
        label_pos = [x_expanded[k] for k in sorted(expanded.label_origin)]
    else:
        label_pos = None
    if x is not None:
        x = as_layout(x, g.n_nodes)

    nodes = []
    for idx, node in enumerate(g.nodes):
        entry = {
            "id": node.id,
            "label": node.text,
            "width": 2.0 * node.half_width,
            "height": 2.0 * node.half_height,
        }
        if x is not None:
            entry["x"] = float(x[idx, 0])
            entry["y"] = float(x[idx, 1])
        nodes.append(entry)

    edges = []
    label_ordinal = 0
    for edge in g.edges:
        entry: dict = {"source": edge.source, "target": edge.target}
        if edge.label is not None:
            entry["label"] = edge.label.text
            entry["label_width"] = 2.0 * edge.label.half_width
            entry["label_height"] = 2.0 * edge.label.half_height
            if label_pos is not None:
                entry["label_x"] = float(label_pos[label_ordinal][0])
                entry["label_y"] = float(label_pos[label_ordinal][1])
            label_ordinal += 1
        if edge.color_tag is not None:
            entry["color"] = edge.color_tag
        edges.append(entry)

    return {"format_version": FORMAT_VERSION, "nodes": nodes, "edges": edges}


def read_graph(path, fmt: str = "auto") -> tuple[LabeledGraph, Optional[Layout]]:
    """Load a graph file; positions come back only if every node has x and y."""
    path = Path(path)
    if fmt == "auto":
        fmt = "dot" if path.suffix.lower() in (".dot", ".gv") else "json"
    if fmt == "json":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphInputError(
                f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
        except OSError as exc:
            raise GraphInputError(f"{path}: {exc}") from None
        return graph_from_document(doc)
    if fmt == "dot":
        from .dot import parse_dot

        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise GraphInputError(f"{path}: {exc}") from None
        return graph_from_document(parse_dot(text))
    raise GraphInputError(f"unknown format {fmt!r}")


def write_layout(
    g: LabeledGraph,
    x: Layout,
    path,
    expanded: Optional[ExpandedGraph] = None,
    x_expanded: Optional[Layout] = None,
) -> None:
    """Write the graph with positions filled in; reading it back returns
    the same graph and positions."""
    doc = document_from_graph(g, x, expanded=expanded, x_expanded=x_expanded)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def write_trace_csv(trace: IterationTrace, path) -> None:
    """Persist a trace as CSV: iter, phase, stress, penalty, overlap_pairs,
    rel_movement."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "phase", "stress", "penalty", "overlap_pairs", "rel_movement"])
        for rec in trace.records:
            writer.writerow(
                [rec.iteration, rec.phase, repr(rec.stress), repr(rec.penalty),
                 rec.overlap_pairs, repr(rec.rel_movement)]
            )
