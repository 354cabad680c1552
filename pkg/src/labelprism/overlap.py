"""Axis-aligned label-box geometry: overlap factors and pair detection.

A box is (center_x, center_y, half_width, half_height). All functions are
pure; evaluating them concurrently over disjoint inputs is safe.
"""

from __future__ import annotations

import math
from bisect import bisect_right, insort
from dataclasses import dataclass

import numpy as np

# Returned when two box centers coincide exactly and no finite expansion
# factor separates them; the caller's duplicate-jitter policy resolves
# the configuration on the next pass.
T_CAP = 1000.0

# Intersections thinner than this fraction of the local box scale do not
# count as overlaps, so the no-overlap exit criterion is reachable.
OVERLAP_TOL = 1e-9


@dataclass(frozen=True)
class OverlapFactor:
    """Damped expansion data for one proximity edge.

    ``t`` is the raw expansion factor (always >= 1), ``s`` its damped
    value in [1, s_max], and ``target_length`` is s times the current
    center distance of the pair.
    """

    pair: tuple[int, int]
    t: float
    s: float
    target_length: float


def edge_factor(pair, a, b, s_max: float) -> OverlapFactor:
    """Overlap factor, damping, and target length for one box pair."""
    t = overlap_factor(a, b)
    s = damp_factor(t, s_max)
    dist = math.hypot(a[0] - b[0], a[1] - b[1])
    return OverlapFactor(pair=(min(pair), max(pair)), t=t, s=s, target_length=s * dist)


def overlap_factor(a, b) -> float:
    """Minimal uniform expansion of the segment between two box centers
    that would make the boxes axis-disjoint; 1 when already disjoint.

    A zero gap along one axis contributes an infinite ratio, so the other
    axis decides. Coincident centers return ``T_CAP``.
    """
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    dx = abs(ax - bx)
    dy = abs(ay - by)
    if dx == 0.0 and dy == 0.0:
        return T_CAP
    rx = (aw + bw) / dx if dx > 0.0 else math.inf
    ry = (ah + bh) / dy if dy > 0.0 else math.inf
    return max(min(rx, ry), 1.0)


def damp_factor(t: float, s_max: float) -> float:
    """Cap an overlap factor so only part of an overlap is removed per pass."""
    if t < 1.0:
        raise ValueError(f"overlap factor {t} < 1")
    if s_max <= 1.0:
        raise ValueError(f"damping cap {s_max} must exceed 1")
    return min(t, s_max)


def boxes_overlap(a, b) -> bool:
    """True when the two boxes intersect with positive area.

    Touching edges or corners do not count; the strictness margin is
    ``OVERLAP_TOL`` times the local scale of the pair.
    """
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    dx = abs(ax - bx)
    dy = abs(ay - by)
    wsum = aw + bw
    hsum = ah + bh
    eps = OVERLAP_TOL * max(wsum, hsum, dx, dy)
    return (wsum - dx) > eps and (hsum - dy) > eps


def overlapping_edge_mask(points, half_w, half_h, edge_i, edge_j) -> np.ndarray:
    """Vectorized ``boxes_overlap`` over index pairs into a layout."""
    pts = np.asarray(points, dtype=float)
    dx = np.abs(pts[edge_i, 0] - pts[edge_j, 0])
    dy = np.abs(pts[edge_i, 1] - pts[edge_j, 1])
    wsum = half_w[edge_i] + half_w[edge_j]
    hsum = half_h[edge_i] + half_h[edge_j]
    eps = OVERLAP_TOL * np.maximum(np.maximum(wsum, hsum), np.maximum(dx, dy))
    return ((wsum - dx) > eps) & ((hsum - dy) > eps)


def edge_overlap_factors(points, half_w, half_h, edge_i, edge_j) -> np.ndarray:
    """Vectorized ``overlap_factor`` over index pairs into a layout."""
    pts = np.asarray(points, dtype=float)
    dx = np.abs(pts[edge_i, 0] - pts[edge_j, 0])
    dy = np.abs(pts[edge_i, 1] - pts[edge_j, 1])
    wsum = half_w[edge_i] + half_w[edge_j]
    hsum = half_h[edge_i] + half_h[edge_j]
    with np.errstate(divide="ignore"):
        rx = np.where(dx > 0.0, wsum / np.where(dx > 0.0, dx, 1.0), np.inf)
        ry = np.where(dy > 0.0, hsum / np.where(dy > 0.0, dy, 1.0), np.inf)
    t = np.maximum(np.minimum(rx, ry), 1.0)
    return np.where(np.isfinite(t), t, T_CAP)


def scanline_overlaps(boxes) -> list[tuple[int, int]]:
    """All pairs of boxes that intersect with positive area.

    Sweeps box x-intervals left to right, keeping an active set ordered by
    the bottom edge; candidate pairs are confirmed with ``boxes_overlap``,
    so the result matches the all-pairs test exactly. Pairs come back
    sorted with i < j.
    """
    arr = np.asarray(boxes, dtype=float)
    if arr.size == 0:
        return []
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError("boxes must be (n, 4): x, y, half_width, half_height")

    n = arr.shape[0]
    events = []
    for i in range(n):
        x, _, w, _ = arr[i]
        events.append((x - w, 0, i))  # start
        events.append((x + w, 1, i))  # end
    # Starts sort before ends at equal x so touching candidates are still
    # examined (and then rejected by the strict predicate).
    events.sort()

    active: list[tuple[float, int]] = []  # (bottom edge, index), sorted
    out: list[tuple[int, int]] = []
    for _, kind, i in events:
        x, y, w, h = arr[i]
        lo, hi = y - h, y + h
        if kind == 1:
            active.remove((lo, i))
            continue
        # Every active box whose bottom edge is at or below our top edge is
        # a candidate; the predicate filters on the actual y-extents.
        pos = bisect_right(active, (hi, n))
        box_i = (x, y, w, h)
        for blo, j in active[:pos]:
            if boxes_overlap(box_i, arr[j]):
                out.append((min(i, j), max(i, j)))
        insort(active, (lo, i))
    out.sort()
    return out
