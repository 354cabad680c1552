"""Self-contained initial point layout via the full all-pairs stress model.

Exists so the pipeline runs without externally supplied coordinates.
The all-pairs graph distances make this quadratic in the node count;
practical inputs top out around ten thousand nodes, and desk-scale graphs
are the intended use.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import LabeledGraph, Layout
from .solver import StressProblem, majorization_step, proximity_stress


@dataclass(frozen=True)
class InitialLayoutConfig:
    random_seed: int = 0
    max_iters: int = 200
    convergence_tol: float = 1e-4
    edge_length_unit: float = 1.0

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if self.edge_length_unit <= 0:
            raise ValueError("edge_length_unit must be positive")


def _adjacency(g: LabeledGraph) -> list[list[int]]:
    adj: list[set[int]] = [set() for _ in g.nodes]
    for e in g.edges:
        i = g.node_index(e.source)
        j = g.node_index(e.target)
        adj[i].add(j)
        adj[j].add(i)
    return [sorted(s) for s in adj]


def _bfs_hops(adj: list[list[int]], start: int) -> np.ndarray:
    n = len(adj)
    dist = np.full(n, -1, dtype=int)
    dist[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def all_pairs_graph_distance(
    g: LabeledGraph, edge_length_unit: float = 1.0
) -> np.ndarray:
    """Hop-count distances between all node pairs, scaled by the unit length.

    Pairs in different components get 1.5 times the hop diameter of the
    largest component (floored at one hop), which keeps components apart
    without exploding the drawing area.
    """
    adj = _adjacency(g)
    n = len(adj)
    hops = np.empty((n, n), dtype=float)
    for i in range(n):
        hops[i] = _bfs_hops(adj, i)

    reachable = hops >= 0
    if not np.all(reachable):
        # Hop diameter of the largest component, floored at one hop.
        largest_size = 0
        diameter = 0
        seen: set[int] = set()
        for i in range(n):
            if i in seen:
                continue
            members = np.flatnonzero(reachable[i])
            seen.update(int(m) for m in members)
            if len(members) > largest_size:
                largest_size = len(members)
                diameter = int(hops[np.ix_(members, members)].max())
        hops[~reachable] = 1.5 * max(diameter, 1)
    return hops * edge_length_unit


def initial_layout(
    g: LabeledGraph,
    cfg: InitialLayoutConfig | None = None,
    x_start: np.ndarray | None = None,
) -> Layout:
    """Place nodes by majorizing the all-pairs stress from a seeded start.

    Deterministic given the seed; the stress never increases across
    iterations, and the loop stops on small relative movement or the
    iteration cap. ``x_start`` overrides the seeded starting positions
    (warm starts, permutation-invariance checks).
    """
    if cfg is None:
        cfg = InitialLayoutConfig()
    n = g.n_nodes
    if x_start is not None:
        x = np.asarray(x_start, dtype=float).copy()
        if x.shape != (n, 2):
            raise ValueError(f"x_start shape {x.shape} does not match node count {n}")
    else:
        rng = np.random.default_rng(cfg.random_seed)
        x = rng.uniform(0.0, np.sqrt(n), size=(n, 2))
    if n == 1:
        return x

    dmat = all_pairs_graph_distance(g, cfg.edge_length_unit)
    iu, ju = np.triu_indices(n, k=1)
    d = dmat[iu, ju]
    problem = StressProblem(
        n=n,
        edge_i=iu,
        edge_j=ju,
        edge_w=1.0 / d**2,
        edge_d=d,
        pen_i=np.array([], dtype=np.intp),
        pen_j=np.array([], dtype=np.intp),
        pen_k=np.array([], dtype=np.intp),
        pen_w=np.array([], dtype=float),
        rho=0.0,
    )

    for _ in range(cfg.max_iters):
        x_new = majorization_step(problem, x)
        denom = float(np.linalg.norm(x - x.mean(axis=0)))
        move = float(np.linalg.norm(x_new - x))
        x = x_new
        if denom > 0 and move / denom < cfg.convergence_tol:
            break
    return x


def full_stress(g: LabeledGraph, x: Layout, edge_length_unit: float = 1.0) -> float:
    """All-pairs stress energy of a layout, for monitoring and tests."""
    n = g.n_nodes
    if n < 2:
        return 0.0
    dmat = all_pairs_graph_distance(g, edge_length_unit)
    iu, ju = np.triu_indices(n, k=1)
    d = dmat[iu, ju]
    problem = StressProblem(
        n=n,
        edge_i=iu,
        edge_j=ju,
        edge_w=1.0 / d**2,
        edge_d=d,
        pen_i=np.array([], dtype=np.intp),
        pen_j=np.array([], dtype=np.intp),
        pen_k=np.array([], dtype=np.intp),
        pen_w=np.array([], dtype=float),
        rho=0.0,
    )
    return proximity_stress(problem, x)
