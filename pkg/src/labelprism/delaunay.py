"""Delaunay triangulation of label positions, the proximity scaffold.

Incremental (Bowyer-Watson) insertion over a triangulation that carries
ghost triangles along the convex hull instead of a super-triangle, so
points outside the current hull need no special casing. Predicates are
evaluated in floating point with a permanent-style error bound; any sign
too close to zero is recomputed exactly in rational arithmetic, which
makes co-circular and collinear configurations deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GraphInputError, NumericalError

GHOST = -1

# Relative determinant magnitude below which the exact predicate is used.
EXACT_THRESHOLD = 1e-12

FROM_TRIANGULATION = "triangulation"
FROM_SCANLINE = "scanline"


@dataclass
class ProximityGraph:
    """Edge set over point indices, optionally augmented with overlap pairs.

    ``edges`` holds unordered pairs normalized to (i, j) with i < j, sorted,
    with no duplicates or self-pairs. ``flags`` marks the provenance of each
    edge. ``triangles`` lists the finite triangles of the triangulation;
    it is empty in the collinear path-graph fallback.
    """

    edges: list[tuple[int, int]]
    flags: list[str]
    triangles: list[tuple[int, int, int]]

    def augmented_with(self, pairs) -> "ProximityGraph":
        """Return a copy with extra overlap pairs folded in."""
        seen = set(self.edges)
        edges = list(self.edges)
        flags = list(self.flags)
        for i, j in pairs:
            if i == j:
                continue
            pair = (min(i, j), max(i, j))
            if pair in seen:
                continue
            seen.add(pair)
            edges.append(pair)
            flags.append(FROM_SCANLINE)
        return ProximityGraph(edges=edges, flags=flags, triangles=list(self.triangles))


def _orient_exact(ux, uy, vx, vy, px, py) -> int:
    ux, uy = Fraction(ux), Fraction(uy)
    vx, vy = Fraction(vx), Fraction(vy)
    px, py = Fraction(px), Fraction(py)
    det = (vx - ux) * (py - uy) - (vy - uy) * (px - ux)
    return (det > 0) - (det < 0)


def orientation(u, v, p) -> int:
    """Sign of the signed area of triangle (u, v, p): +1 counterclockwise."""
    ux, uy = u
    vx, vy = v
    px, py = p
    a = (vx - ux) * (py - uy)
    b = (vy - uy) * (px - ux)
    det = a - b
    bound = EXACT_THRESHOLD * (abs(a) + abs(b))
    if abs(det) <= bound:
        return _orient_exact(ux, uy, vx, vy, px, py)
    return 1 if det > 0 else -1


def _incircle_exact(a, b, c, d) -> int:
    ax, ay = Fraction(a[0]) - Fraction(d[0]), Fraction(a[1]) - Fraction(d[1])
    bx, by = Fraction(b[0]) - Fraction(d[0]), Fraction(b[1]) - Fraction(d[1])
    cx, cy = Fraction(c[0]) - Fraction(d[0]), Fraction(c[1]) - Fraction(d[1])
    det = (
        (ax * ax + ay * ay) * (bx * cy - by * cx)
        - (bx * bx + by * by) * (ax * cy - ay * cx)
        + (cx * cx + cy * cy) * (ax * by - ay * bx)
    )
    return (det > 0) - (det < 0)


def incircle(a, b, c, d) -> int:
    """Sign test: +1 if d lies strictly inside the circumcircle of CCW (a, b, c)."""
    ax, ay = a[0] - d[0], a[1] - d[1]
    bx, by = b[0] - d[0], b[1] - d[1]
    cx, cy = c[0] - d[0], c[1] - d[1]
    alift = ax * ax + ay * ay
    blift = bx * bx + by * by
    clift = cx * cx + cy * cy
    det = (
        alift * (bx * cy - by * cx)
        - blift * (ax * cy - ay * cx)
        + clift * (ax * by - ay * bx)
    )
    perm = (
        alift * (abs(bx * cy) + abs(by * cx))
        + blift * (abs(ax * cy) + abs(ay * cx))
        + clift * (abs(ax * by) + abs(ay * bx))
    )
    if abs(det) <= EXACT_THRESHOLD * perm:
        return _incircle_exact(a, b, c, d)
    return 1 if det > 0 else -1


def _strictly_between(u, v, p) -> bool:
    """Given exactly collinear u, v, p: is p strictly inside segment uv?"""
    if abs(v[0] - u[0]) >= abs(v[1] - u[1]):
        lo, hi = min(u[0], v[0]), max(u[0], v[0])
        return lo < p[0] < hi
    lo, hi = min(u[1], v[1]), max(u[1], v[1])
    return lo < p[1] < hi


class _SlotTable:
    """Rows of small int tuples in a numpy array with an alive mask.

    Keeps the per-insertion predicate sweeps vectorized without rebuilding
    arrays from Python tuples every time.
    """

    def __init__(self, width: int, capacity: int):
        self.rows = np.zeros((capacity, width), dtype=np.intp)
        self.alive = np.zeros(capacity, dtype=bool)
        self.count = 0
        self.row_of: dict[tuple, int] = {}
        self.free: list[int] = []

    def add(self, key: tuple) -> None:
        if self.free:
            row = self.free.pop()
        else:
            if self.count == self.rows.shape[0]:
                self.rows = np.concatenate([self.rows, np.zeros_like(self.rows)])
                self.alive = np.concatenate([self.alive, np.zeros_like(self.alive)])
            row = self.count
            self.count += 1
        self.rows[row] = key
        self.alive[row] = True
        self.row_of[key] = row

    def remove(self, key: tuple) -> None:
        row = self.row_of.pop(key)
        self.alive[row] = False
        self.free.append(row)

    def keys(self):
        return self.row_of.keys()


class _Triangulation:
    """Mutable Bowyer-Watson state: finite triangles plus hull ghosts.

    Finite triangles are stored counterclockwise, rotated so the smallest
    index comes first. A ghost edge (u, v) stands for the unbounded region
    left of the directed edge u->v, which runs clockwise along the hull;
    its "circumdisk" is that open half-plane plus the open segment uv.
    """

    def __init__(self, pts: np.ndarray):
        self.pts = pts
        n = pts.shape[0]
        self.finite = _SlotTable(3, max(4 * n, 16))
        self.ghosts = _SlotTable(2, max(2 * n, 16))

    @staticmethod
    def _canon(a: int, b: int, c: int) -> tuple[int, int, int]:
        if a <= b and a <= c:
            return (a, b, c)
        if b <= c:
            return (b, c, a)
        return (c, a, b)

    def add_finite(self, a: int, b: int, c: int) -> None:
        self.finite.add(self._canon(a, b, c))

    def bootstrap(self, i0: int, i1: int, i2: int) -> None:
        p = self.pts
        if orientation(p[i0], p[i1], p[i2]) < 0:
            i0, i1 = i1, i0
        self.add_finite(i0, i1, i2)
        # Reversed hull edges so the infinite side sits left of each ghost.
        self.ghosts.add((i1, i0))
        self.ghosts.add((i2, i1))
        self.ghosts.add((i0, i2))

    def _bad_finite(self, d: int) -> list[tuple[int, int, int]]:
        count = self.finite.count
        if count == 0:
            return []
        # Dead rows keep stale (but in-range) indices; the alive mask
        # filters them after the vectorized predicate.
        t = self.finite.rows[:count]
        alive = self.finite.alive[:count]
        p = self.pts
        dp = p[d]
        a = p[t[:, 0]] - dp
        b = p[t[:, 1]] - dp
        c = p[t[:, 2]] - dp
        alift = a[:, 0] ** 2 + a[:, 1] ** 2
        blift = b[:, 0] ** 2 + b[:, 1] ** 2
        clift = c[:, 0] ** 2 + c[:, 1] ** 2
        m1 = b[:, 0] * c[:, 1]
        m2 = b[:, 1] * c[:, 0]
        m3 = a[:, 0] * c[:, 1]
        m4 = a[:, 1] * c[:, 0]
        m5 = a[:, 0] * b[:, 1]
        m6 = a[:, 1] * b[:, 0]
        det = alift * (m1 - m2) - blift * (m3 - m4) + clift * (m5 - m6)
        perm = (
            alift * (np.abs(m1) + np.abs(m2))
            + blift * (np.abs(m3) + np.abs(m4))
            + clift * (np.abs(m5) + np.abs(m6))
        )
        bad_mask = alive & (det > 0)
        uncertain = alive & (np.abs(det) <= EXACT_THRESHOLD * perm)
        for pos in np.flatnonzero(uncertain):
            tri = t[pos]
            bad_mask[pos] = (
                _incircle_exact(p[tri[0]], p[tri[1]], p[tri[2]], dp) > 0
            )
        return [tuple(row) for row in t[bad_mask]]

    def _bad_ghosts(self, d: int) -> list[tuple[int, int]]:
        count = self.ghosts.count
        if count == 0:
            return []
        e = self.ghosts.rows[:count]
        alive = self.ghosts.alive[:count]
        p = self.pts
        dp = p[d]
        u = p[e[:, 0]]
        v = p[e[:, 1]]
        t1 = (v[:, 0] - u[:, 0]) * (dp[1] - u[:, 1])
        t2 = (v[:, 1] - u[:, 1]) * (dp[0] - u[:, 0])
        det = t1 - t2
        bad_mask = alive & (det > 0)
        uncertain = alive & (np.abs(det) <= EXACT_THRESHOLD * (np.abs(t1) + np.abs(t2)))
        for pos in np.flatnonzero(uncertain):
            sign = _orient_exact(
                u[pos, 0], u[pos, 1], v[pos, 0], v[pos, 1], dp[0], dp[1]
            )
            bad_mask[pos] = sign > 0 or (
                sign == 0 and _strictly_between(u[pos], v[pos], dp)
            )
        return [tuple(row) for row in e[bad_mask]]

    def insert(self, d: int) -> None:
        bad_finite = self._bad_finite(d)
        bad_ghosts = self._bad_ghosts(d)
        if not bad_finite and not bad_ghosts:
            raise NumericalError(f"point {d} conflicts with no triangle")

        # Directed edges of the cavity; boundary edges lack their reverse.
        directed: set[tuple[int, int]] = set()
        for a, b, c in bad_finite:
            directed.update(((a, b), (b, c), (c, a)))
        for u, v in bad_ghosts:
            directed.update(((u, v), (v, GHOST), (GHOST, u)))

        for tri in bad_finite:
            self.finite.remove(tri)
        for edge in bad_ghosts:
            self.ghosts.remove(edge)

        for u, v in directed:
            if (v, u) in directed:
                continue
            # Cyclic rotation keeps the ghost sentinel in third position:
            # (GHOST, v, d) -> (v, d, GHOST) and (u, GHOST, d) -> (d, u, GHOST).
            if u == GHOST:
                self.ghosts.add((v, d))
            elif v == GHOST:
                self.ghosts.add((d, u))
            else:
                self.add_finite(u, v, d)


def _collinear_fallback(pts: np.ndarray) -> ProximityGraph:
    spans = pts.max(axis=0) - pts.min(axis=0)
    if spans[0] >= spans[1]:
        order = np.lexsort((pts[:, 1], pts[:, 0]))
    else:
        order = np.lexsort((pts[:, 0], pts[:, 1]))
    edges = []
    for a, b in zip(order[:-1], order[1:]):
        i, j = int(a), int(b)
        edges.append((min(i, j), max(i, j)))
    edges.sort()
    return ProximityGraph(edges=edges, flags=[FROM_TRIANGULATION] * len(edges), triangles=[])


def triangulate(points) -> ProximityGraph:
    """Delaunay triangulation of the given points, as a proximity edge set.

    Requires at least one point and no exact duplicates (callers jitter
    coincident positions beforehand). Fully collinear inputs degrade to a
    path graph along the line. Output is deterministic for a fixed input
    ordering; co-circular ties are resolved by the exact predicates and
    the fixed insertion order.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
        raise GraphInputError("triangulate expects an (n, 2) array with n >= 1")
    if not np.all(np.isfinite(pts)):
        raise GraphInputError("triangulate requires finite coordinates")

    n = pts.shape[0]
    seen: dict[tuple[float, float], int] = {}
    for i in range(n):
        key = (float(pts[i, 0]), float(pts[i, 1]))
        if key in seen:
            raise GraphInputError(
                f"duplicate point at index {i} (same as index {seen[key]})"
            )
        seen[key] = i

    if n == 1:
        return ProximityGraph(edges=[], flags=[], triangles=[])
    if n == 2:
        return ProximityGraph(edges=[(0, 1)], flags=[FROM_TRIANGULATION], triangles=[])

    first_noncollinear = -1
    for k in range(2, n):
        if orientation(pts[0], pts[1], pts[k]) != 0:
            first_noncollinear = k
            break
    if first_noncollinear < 0:
        return _collinear_fallback(pts)

    tri = _Triangulation(pts)
    tri.bootstrap(0, 1, first_noncollinear)
    for d in range(2, n):
        if d == first_noncollinear:
            continue
        tri.insert(d)

    edge_set: set[tuple[int, int]] = set()
    for a, b, c in tri.finite.keys():
        for i, j in ((a, b), (b, c), (c, a)):
            edge_set.add((min(i, j), max(i, j)))
    edges = sorted(edge_set)
    triangles = sorted(tuple(int(v) for v in t) for t in tri.finite.keys())
    return ProximityGraph(
        edges=edges,
        flags=[FROM_TRIANGULATION] * len(edges),
        triangles=triangles,
    )
