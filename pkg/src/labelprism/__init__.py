"""Removal of node-label and edge-label overlaps from graph layouts.

Given a graph whose nodes (and optionally edges) carry rectangular
labels, plus a straight-line layout, the package produces a nearby layout
in which no two label boxes overlap. The layout's shape is preserved by a
Delaunay proximity scaffold; edge labels ride on their edges, which stay
as straight as the packing allows. Three drivers are provided: ``prism``
(node labels only), ``vprism`` (edge labels as free nodes), and
``eprism`` (midpoint-penalized, keeping edges straight).
"""

from .delaunay import ProximityGraph, triangulate
from .engine import (
    BendStats,
    EngineConfig,
    IterationRecord,
    IterationTrace,
    bend_angle_stats,
    eprism,
    prism,
    vprism,
)
from .errors import GraphInputError, LabelPrismError, NumericalError, NumericalWarning
from .fileio import (
    document_from_graph,
    graph_from_document,
    read_graph,
    write_layout,
    write_trace_csv,
)
from .layout_init import InitialLayoutConfig, all_pairs_graph_distance, initial_layout
from .model import (
    EdgeLabel,
    EdgeRecord,
    ExpandedGraph,
    LabeledGraph,
    Layout,
    NodeLabel,
    expand_graph,
    seed_label_positions,
)
from .overlap import (
    OverlapFactor,
    boxes_overlap,
    damp_factor,
    edge_factor,
    overlap_factor,
    scanline_overlaps,
)
from .render import RenderStyle, render_svg, svg_document
from .solver import (
    CGInfo,
    StressProblem,
    SymSparseMatrix,
    conjugate_gradient,
    majorant_rhs_matrix,
    majorization_step,
    midpoint_penalty,
    midpoint_penalty_matrix,
    penalized_stress,
    proximity_stress,
    stress_laplacian,
)
from .synth import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "BendStats",
    "CGInfo",
    "EdgeLabel",
    "EdgeRecord",
    "EngineConfig",
    "ExpandedGraph",
    "GraphInputError",
    "InitialLayoutConfig",
    "IterationRecord",
    "IterationTrace",
    "LabelPrismError",
    "LabeledGraph",
    "Layout",
    "NodeLabel",
    "NumericalError",
    "NumericalWarning",
    "OverlapFactor",
    "ProximityGraph",
    "RenderStyle",
    "StressProblem",
    "SymSparseMatrix",
    "all_pairs_graph_distance",
    "bend_angle_stats",
    "boxes_overlap",
    "conjugate_gradient",
    "damp_factor",
    "document_from_graph",
    "edge_factor",
    "eprism",
    "expand_graph",
    "generate_synthetic",
    "graph_from_document",
    "initial_layout",
    "majorant_rhs_matrix",
    "majorization_step",
    "midpoint_penalty",
    "midpoint_penalty_matrix",
    "overlap_factor",
    "penalized_stress",
    "prism",
    "proximity_stress",
    "read_graph",
    "render_svg",
    "scanline_overlaps",
    "seed_label_positions",
    "stress_laplacian",
    "svg_document",
    "triangulate",
    "vprism",
    "write_layout",
    "write_trace_csv",
]
