"""Seeded synthetic graph generators for tests, demos, and benchmarks.

Each generator returns a graph document (the native JSON schema) and is
deterministic for a given seed. ``relay_chain`` mimics tour-style data:
several colored chains over a shared node set with per-edge year labels,
so multi-edges between popular node pairs arise naturally.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional

import numpy as np

KINDS = ("grid", "star", "relay_chain", "random_gnm")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "grid": {"rows": 4, "cols": 4, "labeled_fraction": 0.5},
    "star": {"leaves": 8, "labeled_fraction": 1.0},
    "relay_chain": {"countries": 20, "chains": 4, "chain_length": 10},
    "random_gnm": {"n": 24, "m": 36, "labeled_fraction": 0.5},
}


def _params(kind: str, params: Optional[Mapping[str, Any]]) -> dict[str, Any]:
    if kind not in _DEFAULTS:
        raise ValueError(f"unknown synthetic kind {kind!r}; choose from {KINDS}")
    merged = dict(_DEFAULTS[kind])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"unknown parameter {key!r} for kind {kind!r}")
        merged[key] = value
    return merged


def _label_subset(rng: np.random.Generator, n_edges: int, fraction: float) -> set[int]:
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"labeled_fraction must be in [0, 1], got {fraction}")
    count = int(round(fraction * n_edges))
    if count == 0:
        return set()
    return set(int(i) for i in rng.choice(n_edges, size=count, replace=False))


def generate_synthetic(kind: str, params: Optional[Mapping[str, Any]] = None,
                       seed: int = 0) -> dict:
    """Generate a graph document of the requested kind, deterministic per seed."""
    p = _params(kind, params)
    rng = np.random.default_rng(seed)

    if kind == "grid":
        rows, cols = int(p["rows"]), int(p["cols"])
        if rows < 1 or cols < 1:
            raise ValueError("grid needs rows >= 1 and cols >= 1")
        ids = [[f"n{r}_{c}" for c in range(cols)] for r in range(rows)]
        nodes = [{"id": ids[r][c]} for r in range(rows) for c in range(cols)]
        pairs = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    pairs.append((ids[r][c], ids[r][c + 1]))
                if r + 1 < rows:
                    pairs.append((ids[r][c], ids[r + 1][c]))
        labeled = _label_subset(rng, len(pairs), float(p["labeled_fraction"]))
        edges = []
        for idx, (a, b) in enumerate(pairs):
            entry: dict = {"source": a, "target": b}
            if idx in labeled:
                entry["label"] = f"e{idx}"
            edges.append(entry)

    elif kind == "star":
        leaves = int(p["leaves"])
        if leaves < 1:
            raise ValueError("star needs at least one leaf")
        nodes = [{"id": "hub"}] + [{"id": f"leaf{i}"} for i in range(leaves)]
        labeled = _label_subset(rng, leaves, float(p["labeled_fraction"]))
        edges = []
        for i in range(leaves):
            entry = {"source": "hub", "target": f"leaf{i}"}
            if i in labeled:
                entry["label"] = f"e{i}"
            edges.append(entry)

    elif kind == "relay_chain":
        countries = int(p["countries"])
        chains = int(p["chains"])
        length = int(p["chain_length"])
        if countries < 2 or chains < 1 or length < 1:
            raise ValueError("relay_chain needs countries >= 2, chains >= 1, chain_length >= 1")
        if length + 1 > countries:
            raise ValueError("chain_length + 1 cannot exceed countries")
        nodes = [{"id": f"C{i:02d}"} for i in range(countries)]
        edges = []
        for c in range(chains):
            stops = rng.permutation(countries)[: length + 1]
            season = "summer" if c % 2 == 0 else "winter"
            year = 1936 + 4 * c
            tag = "S" if season == "summer" else "W"
            for a, b in zip(stops[:-1], stops[1:]):
                edges.append(
                    {
                        "source": f"C{int(a):02d}",
                        "target": f"C{int(b):02d}",
                        "label": f"{tag}{year}",
                        "color": season,
                    }
                )

    else:  # random_gnm
        n, m = int(p["n"]), int(p["m"])
        if n < 2:
            raise ValueError("random_gnm needs n >= 2")
        max_m = n * (n - 1) // 2
        if not 0 <= m <= max_m:
            raise ValueError(f"random_gnm needs 0 <= m <= {max_m}")
        nodes = [{"id": f"n{i}"} for i in range(n)]
        chosen = rng.choice(max_m, size=m, replace=False)
        all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        labeled = _label_subset(rng, m, float(p["labeled_fraction"]))
        edges = []
        for idx, sel in enumerate(sorted(int(c) for c in chosen)):
            a, b = all_pairs[sel]
            entry = {"source": f"n{a}", "target": f"n{b}"}
            if idx in labeled:
                entry["label"] = f"e{idx}"
            edges.append(entry)

    return {"format_version": "1", "nodes": nodes, "edges": edges}
