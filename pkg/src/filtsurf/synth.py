"""Synthetic dynamic graphs and SI-dissemination labelling tasks.

The synthetic task grows each dynamic graph from a preferential-attachment
seed graph, adding a fixed number of nodes per timestep.  Edge weights are
integers drawn uniformly from a class-dependent range, so the two classes
are distinguishable only through edge weights.  The SI tasks label BFS
subgraphs of a static base graph with susceptible-infected dynamics.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .graphs import Dataset, DynamicGraph, GraphSnapshot, make_dataset, snapshot


@dataclass(frozen=True)
class SynthConfig:
    n_graphs: int
    seed_nodes: int = 10
    ba_m: int = 2
    timesteps: int = 10
    nodes_per_step: int = 5
    class0_weights: tuple[int, int] = (1, 5)
    class1_weights: tuple[int, int] = (6, 10)
    seed: int = 0

    def __post_init__(self):
        if self.n_graphs < 1:
            raise ValueError("n_graphs must be at least 1")
        if not 1 <= self.ba_m < self.seed_nodes:
            raise ValueError("need 1 <= ba_m < seed_nodes")
        if self.timesteps < 1:
            raise ValueError("timesteps must be at least 1")
        if self.nodes_per_step < 1:
            raise ValueError("nodes_per_step must be at least 1")
        for rng_ in (self.class0_weights, self.class1_weights):
            if rng_[0] >= rng_[1]:
                raise ValueError(f"degenerate weight range {rng_}")


@dataclass(frozen=True)
class SiConfig:
    p: float
    stop_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("infection probability must lie in [0, 1]")
        if not 0.0 < self.stop_fraction <= 1.0:
            raise ValueError("stop_fraction must lie in (0, 1]")


def _distinct_targets(repeated: list[int], m: int, rng: np.random.Generator) -> list[int]:
    # uniform draws from the degree-weighted multiset until m distinct hits
    targets: set[int] = set()
    while len(targets) < m:
        targets.add(repeated[int(rng.integers(0, len(repeated)))])
    return sorted(targets)


class _BaGrower:
    """Preferential-attachment growth with per-edge weight draws.

    Node labels come from ``rng``; weights from the separate ``weight_rng``
    stream so that structure is identically distributed across classes.
    """

    def __init__(self, ba_m: int, weight_range: tuple[int, int],
                 rng: np.random.Generator, weight_rng: np.random.Generator):
        self.ba_m = ba_m
        self.lo, self.hi = weight_range
        self.rng = rng
        self.weight_rng = weight_rng
        self.labels: dict[int, int] = {}
        self.edges: list[tuple[int, int, float]] = []
        # nodes repeated once per incident edge: uniform draws are
        # degree-proportional
        self.repeated: list[int] = []

    def _draw_weight(self) -> float:
        return float(self.weight_rng.integers(self.lo, self.hi + 1))

    def _add_node(self, node: int) -> None:
        self.labels[node] = int(self.rng.integers(0, 2))

    def seed_graph(self, seed_nodes: int) -> None:
        # star on ba_m + 1 nodes, then preferential attachment up to seed_nodes
        for node in range(self.ba_m + 1):
            self._add_node(node)
        for leaf in range(1, self.ba_m + 1):
            self.edges.append((0, leaf, self._draw_weight()))
            self.repeated += [0, leaf]
        for node in range(self.ba_m + 1, seed_nodes):
            self.attach(node)

    def attach(self, node: int) -> None:
        self._add_node(node)
        targets = _distinct_targets(self.repeated, self.ba_m, self.rng)
        for tgt in targets:
            self.edges.append((tgt, node, self._draw_weight()))
        self.repeated += targets + [node] * self.ba_m
        return None

    def snapshot(self) -> GraphSnapshot:
        return snapshot(self.labels.items(), self.edges)


def _synth_graph(cfg: SynthConfig, cls: int, seq: np.random.SeedSequence) -> list[GraphSnapshot]:
    struct_seq, weight_seq = seq.spawn(2)
    rng = np.random.default_rng(struct_seq)
    weight_rng = np.random.default_rng(weight_seq)
    weight_range = cfg.class0_weights if cls == 0 else cfg.class1_weights
    grower = _BaGrower(cfg.ba_m, weight_range, rng, weight_rng)
    grower.seed_graph(cfg.seed_nodes)
    snaps = [grower.snapshot()]
    next_node = cfg.seed_nodes
    for _ in range(1, cfg.timesteps):
        for _ in range(cfg.nodes_per_step):
            grower.attach(next_node)
            next_node += 1
        snaps.append(grower.snapshot())
    return snaps


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Balanced two-class dataset of growing preferential-attachment graphs.

    Even graph indices are class 0, odd ones class 1 (for odd ``n_graphs``
    the extra graph lands in class 0).  Fully determined by ``cfg.seed``.
    """
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.n_graphs)
    graphs = []
    for k in range(cfg.n_graphs):
        cls = k % 2
        snaps = _synth_graph(cfg, cls, seqs[k])
        graphs.append(DynamicGraph(
            graph_id=f"g{k:06d}", label=cls, snapshots=tuple(snaps)
        ))
    return make_dataset(graphs)


def generate_base_snapshot(n_nodes: int, ba_m: int, weight_range: tuple[int, int],
                           seed: int) -> GraphSnapshot:
    """One static preferential-attachment graph, used as SI base material."""
    if not 1 <= ba_m < n_nodes:
        raise ValueError("need 1 <= ba_m < n_nodes")
    seq = np.random.SeedSequence(seed)
    struct_seq, weight_seq = seq.spawn(2)
    grower = _BaGrower(ba_m, weight_range,
                       np.random.default_rng(struct_seq),
                       np.random.default_rng(weight_seq))
    grower.seed_graph(n_nodes)
    return grower.snapshot()


def bfs_subgraphs(base: GraphSnapshot, size_cap: int) -> list[GraphSnapshot]:
    """One induced subgraph per start vertex, grown by BFS in node-id order."""
    if size_cap < 1:
        raise ValueError("size_cap must be at least 1")
    adj = base.neighbors()
    out = []
    for start in sorted(base.labels):
        visited = {start}
        queue = deque([start])
        while queue and len(visited) < size_cap:
            u = queue.popleft()
            for v in adj[u]:
                if v not in visited and len(visited) < size_cap:
                    visited.add(v)
                    queue.append(v)
        nodes = [(n, base.labels[n]) for n in visited]
        edges = [(u, v, w) for u, v, w in base.edges if u in visited and v in visited]
        out.append(snapshot(nodes, edges))
    return out


def simulate_si(g: GraphSnapshot, cfg: SiConfig) -> DynamicGraph:
    """Susceptible-infected dynamics: node labels are the infection states.

    Starts from one uniformly random infected node and stops at the first
    timestep where the infected count reaches
    ceil(stop_fraction * |V|).  Structure and weights stay constant across
    timesteps; runs that make no progress (p = 0, or a component too small
    to reach the target) hit a 10 * |V| step cap and raise.
    """
    ids = sorted(g.labels)
    if not ids:
        raise ValueError("cannot simulate on an empty snapshot")
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    adj = g.neighbors()
    start = ids[int(rng.integers(0, len(ids)))]
    target = math.ceil(cfg.stop_fraction * len(ids))
    infected = {start}

    def snap() -> GraphSnapshot:
        labels = [(n, 1 if n in infected else 0) for n in ids]
        return snapshot(labels, g.edges)

    snaps = [snap()]
    cap = 10 * len(ids)
    steps = 0
    while len(infected) < target:
        steps += 1
        if steps > cap:
            raise RuntimeError(
                f"SI simulation exceeded {cap} steps without reaching "
                f"{target} infected nodes (p={cfg.p})"
            )
        newly = set()
        for u in sorted(infected):
            for v in adj[u]:
                if v not in infected and rng.random() < cfg.p:
                    newly.add(v)
        infected |= newly
        snaps.append(snap())
    return DynamicGraph(graph_id="si", label=0, snapshots=tuple(snaps))


def _random_label_dynamics(g: GraphSnapshot, n_steps: int, rng: np.random.Generator) -> DynamicGraph:
    # i.i.d. uniform binary labels, resampled per node and per timestep
    ids = sorted(g.labels)
    snaps = []
    for _ in range(n_steps):
        labels = [(n, int(rng.integers(0, 2))) for n in ids]
        snaps.append(snapshot(labels, g.edges))
    return DynamicGraph(graph_id="rand", label=1, snapshots=tuple(snaps))


def build_task(base_graphs: list[GraphSnapshot], task: int,
               p_params: tuple[float, ...], seed: int,
               stop_fraction: float = 0.5) -> Dataset:
    """Assemble an SI classification task dataset.

    Task 1: the first half of the graphs carries SI(p_params[0]) label
    dynamics (class 0), the second half i.i.d. random labels over a
    matching number of timesteps (class 1).  Task 2: SI(p_params[0]) for
    class 0 versus SI(p_params[1]) for class 1.  Odd counts put the extra
    graph in class 0.
    """
    if task not in (1, 2):
        raise ValueError("task must be 1 or 2")
    if not base_graphs:
        raise ValueError("no base graphs given")
    if task == 2 and len(p_params) < 2:
        raise ValueError("task 2 needs two infection probabilities")
    n = len(base_graphs)
    half = (n + 1) // 2
    seqs = np.random.SeedSequence(seed).spawn(n)
    graphs = []
    for k, base in enumerate(base_graphs):
        cls = 0 if k < half else 1
        si_seq, label_seq = seqs[k].spawn(2)
        si_seed = int(si_seq.generate_state(1, np.uint64)[0])
        if task == 2:
            p = p_params[0] if cls == 0 else p_params[1]
            dg = simulate_si(base, SiConfig(p=p, stop_fraction=stop_fraction, seed=si_seed))
        elif cls == 0:
            dg = simulate_si(base, SiConfig(p=p_params[0], stop_fraction=stop_fraction, seed=si_seed))
        else:
            # match the timestep count an SI run would have produced
            reference = simulate_si(
                base, SiConfig(p=p_params[0], stop_fraction=stop_fraction, seed=si_seed)
            )
            dg = _random_label_dynamics(
                base, len(reference), np.random.default_rng(label_seq)
            )
        graphs.append(replace(dg, graph_id=f"si{task}-{k:06d}", label=cls))
    return make_dataset(graphs)
