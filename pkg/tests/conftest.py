"""Shared helpers: seeded random graphs and datasets for oracle tests."""

from __future__ import annotations

import numpy as np
import pytest

from filtsurf.graphs import DynamicGraph, GraphSnapshot, make_dataset, snapshot


def random_snapshot(rng: np.random.Generator, max_nodes: int = 10,
                    tie_weights: bool = False, n_labels: int = 3) -> GraphSnapshot:
    """A random simple graph; weights from a small grid when ties are wanted."""
    n = int(rng.integers(2, max_nodes + 1))
    nodes = [(i, int(rng.integers(0, n_labels))) for i in range(n)]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    k = int(rng.integers(0, len(pairs) + 1))
    chosen = [pairs[i] for i in sorted(rng.choice(len(pairs), size=k, replace=False))]
    edges = []
    for u, v in chosen:
        if tie_weights:
            w = float(rng.integers(1, 5))
        else:
            w = float(np.round(rng.uniform(0.0, 10.0), 6))
        edges.append((u, v, w))
    return snapshot(nodes, edges)


def random_connected_snapshot(rng: np.random.Generator, max_nodes: int = 8,
                              n_labels: int = 2) -> GraphSnapshot:
    """Random connected graph: random spanning tree plus extra edges."""
    n = int(rng.integers(2, max_nodes + 1))
    nodes = [(i, int(rng.integers(0, n_labels))) for i in range(n)]
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return snapshot(nodes, [(u, v, 1.0) for u, v in sorted(edges)])


def random_dataset(rng: np.random.Generator, n_graphs: int = 4,
                   max_timesteps: int = 3, max_nodes: int = 8):
    graphs = []
    for k in range(n_graphs):
        t = int(rng.integers(1, max_timesteps + 1))
        snaps = tuple(random_snapshot(rng, max_nodes=max_nodes) for _ in range(t))
        graphs.append(DynamicGraph(graph_id=f"r{k:04d}", label=int(rng.integers(0, 2)),
                                   snapshots=snaps))
    return make_dataset(graphs)


def random_curve(rng: np.random.Generator, d: int = 2, max_points: int = 6):
    """Random sparse curve: strictly increasing thresholds, changing values."""
    from filtsurf.filtration import FiltrationCurve

    k = int(rng.integers(0, max_points))
    thresholds = np.sort(rng.choice(np.arange(0, 50, dtype=np.float64), size=k, replace=False))
    rows = []
    prev = np.zeros(d, dtype=np.int64)
    for _ in range(k):
        row = prev + rng.integers(0, 3, size=d)
        if np.array_equal(row, prev):
            row = row + np.eye(d, dtype=np.int64)[int(rng.integers(0, d))]
        rows.append(row)
        prev = row
    values = np.array(rows, dtype=np.int64).reshape(k, d)
    return FiltrationCurve(thresholds=tuple(float(t) for t in thresholds),
                           values=values, descriptor_dim=d)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
