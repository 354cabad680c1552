"""Overlap-removal drivers orchestrating triangulation, factors, and solves.

Three modes share one machinery. ``prism`` alternates two loops: expand
proximity-edge pairs until none of them overlap, then augment with
sweep-detected pairs until none remain anywhere. ``vprism`` is the same
run on the expanded graph, treating edge labels as free nodes. ``eprism``
first converges a midpoint-penalized model (keeping labeled edges
straight), then the plain model with sweep augmentation, both under a
relative-movement criterion, and finishes with a ``prism`` cleanup pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .delaunay import triangulate
from .model import ExpandedGraph, LabeledGraph, Layout, as_layout, expand_graph, seed_label_positions
from .overlap import (
    edge_overlap_factors,
    overlapping_edge_mask,
    scanline_overlaps,
)
from .solver import (
    DIST_CLAMP,
    StressProblem,
    majorization_step,
    midpoint_penalty,
    proximity_stress,
)

MODES = ("prism", "vprism", "eprism")

PHASE_LOOP1 = "loop1"
PHASE_LOOP2 = "loop2"
PHASE_CLEANUP = "cleanup"

# Exactly coincident points are separated by this fraction of the bounding
# box diagonal before each triangulation.
DEDUPE_JITTER = 1e-6
_GOLDEN_ANGLE = 2.399963229728653


@dataclass(frozen=True)
class EngineConfig:
    """Knobs of the overlap-removal iteration.

    Defaults: damping cap 1.5, penalty parameter 4, movement threshold
    0.005, and 1000 iterations per loop.
    """

    s_max: float = 1.5
    rho: float = 4.0
    epsilon: float = 0.005
    max_outer_iters: int = 1000
    mode: str = "eprism"

    def __post_init__(self) -> None:
        if self.s_max <= 1.0:
            raise ValueError("s_max must exceed 1")
        if self.rho < 0.0:
            raise ValueError("rho must be non-negative")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass
class IterationRecord:
    """Observables of one outer iteration (one linear solve)."""

    iteration: int
    phase: str
    stress: float
    penalty: float
    overlap_pairs: int
    rel_movement: float
    objective_before: float
    objective_after: float


@dataclass
class IterationTrace:
    """Chronological per-iteration records plus the final convergence flag."""

    records: list[IterationRecord] = field(default_factory=list)
    converged: bool = True


GraphLike = Union[LabeledGraph, ExpandedGraph]


def _half_extents(g: GraphLike) -> tuple[np.ndarray, np.ndarray]:
    return g.half_extent_arrays()


def dedupe_positions(x: Layout) -> Layout:
    """Separate exactly coincident points deterministically.

    Later duplicates of a position are pushed out on a golden-angle spiral
    scaled by the bounding-box diagonal, so triangulation never sees a
    multiset. Inputs without duplicates are returned unchanged.
    """
    seen: dict[tuple[float, float], int] = {}
    dup_rows: list[int] = []
    for idx in range(x.shape[0]):
        key = (float(x[idx, 0]), float(x[idx, 1]))
        if key in seen:
            dup_rows.append(idx)
        else:
            seen[key] = idx
    if not dup_rows:
        return x
    out = x.copy()
    spans = x.max(axis=0) - x.min(axis=0)
    radius = DEDUPE_JITTER * max(float(math.hypot(spans[0], spans[1])), 1.0)
    for m, idx in enumerate(dup_rows, start=1):
        angle = m * _GOLDEN_ANGLE
        out[idx, 0] += radius * m * math.cos(angle)
        out[idx, 1] += radius * m * math.sin(angle)
    return out


def relative_movement(x_new: Layout, x_old: Layout) -> float:
    """Euclidean norm of the move over the centroid-free norm of the start."""
    move = float(np.linalg.norm(x_new - x_old))
    denom = float(np.linalg.norm(x_old - x_old.mean(axis=0)))
    if denom == 0.0:
        return 0.0 if move == 0.0 else math.inf
    return move / denom


class _Driver:
    """Shared per-run state: boxes, config, trace, and iteration counter."""

    def __init__(self, half_w: np.ndarray, half_h: np.ndarray, cfg: EngineConfig,
                 label_origin: dict[int, tuple[int, int]] | None = None):
        self.half_w = half_w
        self.half_h = half_h
        self.cfg = cfg
        self.trace = IterationTrace()
        self.iteration = 0
        if label_origin:
            self.pen_k = np.array(sorted(label_origin), dtype=np.intp)
            self.pen_i = np.array([label_origin[int(k)][0] for k in self.pen_k], dtype=np.intp)
            self.pen_j = np.array([label_origin[int(k)][1] for k in self.pen_k], dtype=np.intp)
        else:
            self.pen_k = np.array([], dtype=np.intp)
            self.pen_i = np.array([], dtype=np.intp)
            self.pen_j = np.array([], dtype=np.intp)

    def build_problem(self, x: Layout, augment=(), with_penalty=False):
        """Triangulate, attach overlap factors, and freeze one step's model.

        Returns the problem plus the number of overlapping pairs among the
        proximity edges (after augmentation).
        """
        prox = triangulate(x)
        if augment:
            prox = prox.augmented_with(augment)
        n = x.shape[0]
        if not prox.edges:
            empty = np.array([], dtype=np.intp)
            problem = StressProblem(
                n=n, edge_i=empty, edge_j=empty,
                edge_w=np.array([], dtype=float), edge_d=np.array([], dtype=float),
                pen_i=empty, pen_j=empty, pen_k=empty,
                pen_w=np.array([], dtype=float), rho=0.0,
            )
            return problem, 0

        ei = np.array([e[0] for e in prox.edges], dtype=np.intp)
        ej = np.array([e[1] for e in prox.edges], dtype=np.intp)
        t = edge_overlap_factors(x, self.half_w, self.half_h, ei, ej)
        s = np.minimum(t, self.cfg.s_max)
        diff = x[ei] - x[ej]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        d = s * dist
        w = 1.0 / d**2
        overlap_count = int(
            np.count_nonzero(overlapping_edge_mask(x, self.half_w, self.half_h, ei, ej))
        )

        if with_penalty and self.pen_k.size:
            pdiff = x[self.pen_i] - x[self.pen_j]
            pdist = np.hypot(pdiff[:, 0], pdiff[:, 1])
            spans = x.max(axis=0) - x.min(axis=0)
            clamp = DIST_CLAMP * max(float(math.hypot(spans[0], spans[1])), 1.0)
            pdist = np.maximum(pdist, clamp)
            pen_w = 1.0 / pdist**2
            problem = StressProblem(
                n=n, edge_i=ei, edge_j=ej, edge_w=w, edge_d=d,
                pen_i=self.pen_i, pen_j=self.pen_j, pen_k=self.pen_k,
                pen_w=pen_w, rho=self.cfg.rho,
            )
        else:
            empty = np.array([], dtype=np.intp)
            problem = StressProblem(
                n=n, edge_i=ei, edge_j=ej, edge_w=w, edge_d=d,
                pen_i=empty, pen_j=empty, pen_k=empty,
                pen_w=np.array([], dtype=float), rho=0.0,
            )
        return problem, overlap_count

    def step(self, x: Layout, problem: StressProblem, phase: str,
             overlap_pairs: int) -> tuple[Layout, float]:
        before = proximity_stress(problem, x) + problem.rho * midpoint_penalty(problem, x)
        x_new = majorization_step(problem, x)
        stress = proximity_stress(problem, x_new)
        pen = problem.rho * midpoint_penalty(problem, x_new)
        move = relative_movement(x_new, x)
        self.iteration += 1
        self.trace.records.append(
            IterationRecord(
                iteration=self.iteration,
                phase=phase,
                stress=stress,
                penalty=pen,
                overlap_pairs=overlap_pairs,
                rel_movement=move,
                objective_before=before,
                objective_after=stress + pen,
            )
        )
        return x_new, move

    def boxes(self, x: Layout) -> np.ndarray:
        return np.column_stack([x, self.half_w, self.half_h])

    def overlap_removal_loops(self, x: Layout, tag1: str, tag2: str) -> Layout:
        """The two no-overlap loops: proximity edges first, then sweep pairs."""
        for _ in range(self.cfg.max_outer_iters):
            x = dedupe_positions(x)
            problem, overlap_count = self.build_problem(x)
            if overlap_count == 0:
                break
            x, _ = self.step(x, problem, tag1, overlap_count)
        else:
            self.trace.converged = False

        for _ in range(self.cfg.max_outer_iters):
            x = dedupe_positions(x)
            pairs = scanline_overlaps(self.boxes(x))
            if not pairs:
                break
            problem, _ = self.build_problem(x, augment=pairs)
            x, _ = self.step(x, problem, tag2, len(pairs))
        else:
            self.trace.converged = False
        return x

    def movement_loop(self, x: Layout, phase: str, with_penalty: bool,
                      with_scanline: bool) -> Layout:
        """Iterate solves until relative movement drops below epsilon."""
        for _ in range(self.cfg.max_outer_iters):
            x = dedupe_positions(x)
            if with_scanline:
                pairs = scanline_overlaps(self.boxes(x))
                problem, _ = self.build_problem(x, augment=pairs, with_penalty=with_penalty)
                count = len(pairs)
            else:
                problem, count = self.build_problem(x, with_penalty=with_penalty)
            x, move = self.step(x, problem, phase, count)
            if move < self.cfg.epsilon:
                break
        return x


def prism(g: GraphLike, x0: Layout, cfg: EngineConfig | None = None) -> tuple[Layout, IterationTrace]:
    """Remove box overlaps while preserving the layout's shape.

    Runs on whichever node set ``g`` carries; edge labels are ignored
    unless the graph is already expanded. The returned trace reports
    non-convergence if the iteration caps were exhausted with overlaps
    remaining.
    """
    if cfg is None:
        cfg = EngineConfig(mode="prism")
    half_w, half_h = _half_extents(g)
    x = as_layout(x0, len(half_w)).copy()
    driver = _Driver(half_w, half_h, cfg)
    x = driver.overlap_removal_loops(x, PHASE_LOOP1, PHASE_LOOP2)
    if scanline_overlaps(driver.boxes(x)):
        driver.trace.converged = False
    return x, driver.trace


def _ensure_expanded(g: GraphLike) -> ExpandedGraph:
    return g if isinstance(g, ExpandedGraph) else expand_graph(g)


def _seed_if_needed(ga: ExpandedGraph, x0: Layout) -> Layout:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape[0] == ga.n_nodes:
        return as_layout(x0, ga.n_nodes).copy()
    return seed_label_positions(ga, as_layout(x0, ga.n_original))


def vprism(g: GraphLike, x0: Layout, cfg: EngineConfig | None = None) -> tuple[Layout, IterationTrace]:
    """Overlap removal on the expanded graph, labels treated as free nodes.

    ``x0`` may cover the original nodes only (labels are then seeded at
    edge midpoints) or the full expanded node set.
    """
    if cfg is None:
        cfg = EngineConfig(mode="vprism")
    ga = _ensure_expanded(g)
    x = _seed_if_needed(ga, x0)
    half_w, half_h = _half_extents(ga)
    driver = _Driver(half_w, half_h, cfg)
    x = driver.overlap_removal_loops(x, PHASE_LOOP1, PHASE_LOOP2)
    if scanline_overlaps(driver.boxes(x)):
        driver.trace.converged = False
    return x, driver.trace


def eprism(g: GraphLike, x0: Layout, cfg: EngineConfig | None = None) -> tuple[Layout, IterationTrace]:
    """Overlap removal that also keeps labeled edges straight.

    Loop 1 converges the midpoint-penalized model; loop 2 the plain model
    with sweep-detected pairs folded into the scaffold; both stop when the
    relative movement drops below ``cfg.epsilon`` or after
    ``cfg.max_outer_iters`` solves. Any overlaps that survive the two
    loops are removed by a final cleanup pass.
    """
    if cfg is None:
        cfg = EngineConfig(mode="eprism")
    ga = _ensure_expanded(g)
    x = _seed_if_needed(ga, x0)
    half_w, half_h = _half_extents(ga)
    driver = _Driver(half_w, half_h, cfg, label_origin=ga.label_origin)

    x = driver.movement_loop(x, PHASE_LOOP1, with_penalty=True, with_scanline=False)
    x = driver.movement_loop(x, PHASE_LOOP2, with_penalty=False, with_scanline=True)
    x = driver.overlap_removal_loops(x, PHASE_CLEANUP, PHASE_CLEANUP)
    if scanline_overlaps(driver.boxes(x)):
        driver.trace.converged = False
    return x, driver.trace


@dataclass
class BendStats:
    """Bend-angle deviations at label nodes: 0 means a perfectly straight edge."""

    mean: float
    max: float
    histogram: np.ndarray
    bin_edges: np.ndarray
    angles: np.ndarray
    degenerate: int


def bend_angle_stats(g: ExpandedGraph, x: Layout, bins: int = 18) -> BendStats:
    """Deviation from straightness at every label node.

    For label node k with parents (i, j) the deviation is pi minus the
    angle between the two arms (x_i - x_k) and (x_j - x_k). A zero-length
    arm is degenerate and recorded as pi.
    """
    x = as_layout(x, g.n_nodes)
    angles = []
    degenerate = 0
    for k in sorted(g.label_origin):
        i, j = g.label_origin[k]
        u = x[i] - x[k]
        v = x[j] - x[k]
        nu = float(np.hypot(u[0], u[1]))
        nv = float(np.hypot(v[0], v[1]))
        if nu == 0.0 or nv == 0.0:
            degenerate += 1
            angles.append(math.pi)
            continue
        cosang = float(np.dot(u, v)) / (nu * nv)
        cosang = min(1.0, max(-1.0, cosang))
        angles.append(math.pi - math.acos(cosang))
    arr = np.asarray(angles, dtype=float)
    hist, edges = np.histogram(arr, bins=bins, range=(0.0, math.pi))
    return BendStats(
        mean=float(arr.mean()) if arr.size else 0.0,
        max=float(arr.max()) if arr.size else 0.0,
        histogram=hist,
        bin_edges=edges,
        angles=arr,
        degenerate=degenerate,
    )
