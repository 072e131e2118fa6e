"""Edge weight (filter) functions for graph filtrations.

Four ways to assign a filtration weight to every edge of a snapshot:

* ``native``      the weight stored on the edge
* ``max-degree``  max of the endpoint degrees
* ``ricci``       coarse Ricci curvature 1 - W(m_x, m_y) / d(x, y)
* ``hks``         max of the endpoint heat kernel signatures

The Wasserstein distance underneath the curvature is solved exactly with a
transportation simplex over rational arithmetic, so curvature values carry
no solver tolerance at all.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .graphs import GraphSnapshot

log = logging.getLogger(__name__)

WEIGHT_KINDS = ("native", "max-degree", "ricci", "hks")

MASS_TOL = 1e-9


@dataclass(frozen=True)
class WeightFunctionConfig:
    """Choice of filter function plus its parameters."""

    kind: str = "native"
    ricci_alpha: float = 0.5
    hks_t: float = 10.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {WEIGHT_KINDS}")
        if not 0.0 <= self.ricci_alpha <= 1.0:
            raise ValueError(f"ricci_alpha must lie in [0, 1], got {self.ricci_alpha}")
        if not self.hks_t > 0.0:
            raise ValueError(f"hks_t must be positive, got {self.hks_t}")


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finitely supported probability measure over node ids."""

    support: tuple[int, ...]
    mass: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass must have the same length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support entries must be distinct")
        if any(m < 0.0 for m in self.mass):
            raise ValueError("masses must be non-negative")
        total = math.fsum(self.mass)
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses must sum to 1 (within {MASS_TOL}), got {total!r}")


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Laplacian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]


class EigensolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# exact optimal transport


def _transport_value(supply, demand, cost):
    """Exact optimum of the transportation problem, all-rational arithmetic.

    ``supply`` and ``demand`` are lists of Fractions with equal totals;
    ``cost`` is a dense row-major table of Fractions.  Uses the classic
    transportation simplex: north-west-corner start, then pivots chosen by
    Bland's rule (first negative reduced cost in row-major order, smallest
    leaving cell), which cannot cycle.
    """
    r, c = len(supply), len(demand)
    a = list(supply)
    b = list(demand)
    flow: dict[tuple[int, int], Fraction] = {}
    basis: set[tuple[int, int]] = set()

    # initial basic feasible solution: exactly r + c - 1 cells, degenerate
    # zero cells included
    i = j = 0
    while True:
        q = a[i] if a[i] < b[j] else b[j]
        flow[(i, j)] = q
        basis.add((i, j))
        a[i] -= q
        b[j] -= q
        if i == r - 1 and j == c - 1:
            break
        if a[i] == 0 and i < r - 1:
            i += 1
        else:
            j += 1

    zero = Fraction(0)
    while True:
        cells = sorted(basis)
        rows_adj: list[list[int]] = [[] for _ in range(r)]
        cols_adj: list[list[int]] = [[] for _ in range(c)]
        for (bi, bj) in cells:
            rows_adj[bi].append(bj)
            cols_adj[bj].append(bi)

        # dual potentials from the basis spanning tree
        u: list[Fraction | None] = [None] * r
        v: list[Fraction | None] = [None] * c
        u[0] = zero
        stack: list[tuple[bool, int]] = [(True, 0)]
        while stack:
            is_row, k = stack.pop()
            if is_row:
                for bj in rows_adj[k]:
                    if v[bj] is None:
                        v[bj] = cost[k][bj] - u[k]
                        stack.append((False, bj))
            else:
                for bi in cols_adj[k]:
                    if u[bi] is None:
                        u[bi] = cost[bi][k] - v[k]
                        stack.append((True, bi))

        entering = None
        for ei in range(r):
            for ej in range(c):
                if (ei, ej) not in basis and cost[ei][ej] - u[ei] - v[ej] < 0:
                    entering = (ei, ej)
                    break
            if entering is not None:
                break
        if entering is None:
            break

        # unique cycle: entering cell plus the tree path row(e) -> col(e)
        start = (True, entering[0])
        target = (False, entering[1])
        parent: dict[tuple[bool, int], tuple[bool, int] | None] = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == target:
                break
            is_row, k = node
            nbrs = rows_adj[k] if is_row else cols_adj[k]
            for nk in nbrs:
                nxt = (not is_row, nk)
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
        path: list[tuple[int, int]] = []
        node = target
        while parent[node] is not None:
            prev = parent[node]
            if prev[0]:
                path.append((prev[1], node[1]))
            else:
                path.append((node[1], prev[1]))
            node = prev
        path.reverse()
        cycle = [entering] + path  # odd positions give up flow

        minus = cycle[1::2]
        theta = min(flow[cell] for cell in minus)
        leaving = min(cell for cell in minus if flow[cell] == theta)
        flow[entering] = zero
        for k, cell in enumerate(cycle):
            if k % 2:
                flow[cell] -= theta
            else:
                flow[cell] += theta
        basis.add(entering)
        basis.remove(leaving)
        del flow[leaving]

    return sum((q * cost[ci][cj] for (ci, cj), q in flow.items()), zero)


def _ground_lookup(ground: Mapping[tuple[int, int], float], a: int, b: int) -> float:
    if a == b:
        return 0.0
    if (a, b) in ground:
        d = ground[(a, b)]
    elif (b, a) in ground:
        d = ground[(b, a)]
    else:
        raise ValueError(f"ground distance for pair ({a}, {b}) missing")
    if not math.isfinite(d) or d < 0.0:
        raise ValueError(f"invalid ground distance {d!r} for pair ({a}, {b})")
    return d


def wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure,
                ground: Mapping[tuple[int, int], float]) -> float:
    """Exact 1-Wasserstein distance between two discrete measures.

    ``ground`` is a symmetric pairwise-distance table over the supports
    (either orientation of a pair may be present; the diagonal is implied).
    Raises if the mass totals differ by more than 1e-9; smaller float dust
    is rebalanced exactly before solving.
    """
    supply = [Fraction(m) for m in mu.mass]
    demand = [Fraction(m) for m in nu.mass]
    total_a = sum(supply, Fraction(0))
    total_b = sum(demand, Fraction(0))
    if abs(float(total_a - total_b)) > MASS_TOL:
        raise ValueError(
            f"measure masses differ: {float(total_a)!r} vs {float(total_b)!r}"
        )
    if total_a == 0:
        return 0.0
    scale = total_a / total_b
    demand = [m * scale for m in demand]
    cost = [
        [Fraction(_ground_lookup(ground, x, y)) for y in nu.support]
        for x in mu.support
    ]
    return float(_transport_value(supply, demand, cost))


# ---------------------------------------------------------------------------
# Ricci curvature


def dispersal_measure(g: GraphSnapshot, x: int, alpha: float) -> DiscreteMeasure:
    """Measure placing mass ``alpha`` on x and (1-alpha)/deg(x) on each neighbour."""
    adj = g.neighbors()
    if not adj[x]:
        raise ValueError(f"node {x} has no neighbours")
    return _measure_from_adj(adj, x, alpha)


def _hop_distances(adj: Mapping[int, list[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _measure_from_adj(adj: Mapping[int, list[int]], x: int, alpha: float) -> DiscreteMeasure:
    nbrs = adj[x]
    share = (1.0 - alpha) / len(nbrs)
    return DiscreteMeasure(support=(x, *nbrs), mass=(alpha, *([share] * len(nbrs))))


def _ricci_from_adj(adj: Mapping[int, list[int]], x: int, y: int, alpha: float) -> float:
    mu = _measure_from_adj(adj, x, alpha)
    nu = _measure_from_adj(adj, y, alpha)
    ground: dict[tuple[int, int], float] = {}
    for a in mu.support:
        dist = _hop_distances(adj, a)
        for b in nu.support:
            ground[(a, b)] = float(dist[b])
    # d(x, y) = 1: (x, y) is an edge and distances are hop counts
    return 1.0 - wasserstein(mu, nu, ground)


def ricci_curvature(g: GraphSnapshot, x: int, y: int, alpha: float = 0.5) -> float:
    """Coarse Ricci curvature of the edge (x, y).

    Ground distances are unweighted hop distances regardless of any native
    edge weights, and the transport problem is solved exactly.
    """
    key = (min(x, y), max(x, y))
    if key not in {(u, v) for u, v, _ in g.edges}:
        raise ValueError(f"({x}, {y}) is not an edge of the snapshot")
    return _ricci_from_adj(g.neighbors(), x, y, alpha)


# ---------------------------------------------------------------------------
# heat kernel signature


def laplacian(g: GraphSnapshot) -> np.ndarray:
    """Combinatorial Laplacian D - A (unweighted), node rows sorted by id."""
    ids = g.node_ids
    index = {node: k for k, node in enumerate(ids)}
    n = len(ids)
    lap = np.zeros((n, n), dtype=np.float64)
    for u, v, _ in g.edges:
        ui, vi = index[u], index[v]
        lap[ui, vi] -= 1.0
        lap[vi, ui] -= 1.0
        lap[ui, ui] += 1.0
        lap[vi, vi] += 1.0
    return lap


def spectral_decomposition(g: GraphSnapshot) -> SpectralDecomposition:
    """Full eigendecomposition of the snapshot Laplacian, validated."""
    lap = laplacian(g)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigendecomposition failed: {exc}") from None
    residual = np.abs(lap @ eigenvectors - eigenvectors * eigenvalues[None, :]).max(axis=0)
    bound = 1e-8 * np.maximum(1.0, np.abs(eigenvalues))
    if np.any(residual > bound):
        raise EigensolverError(f"eigenpair residual too large: {residual.max()!r}")
    gram = eigenvectors.T @ eigenvectors
    if np.abs(gram - np.eye(len(eigenvalues))).max() > 1e-8:
        raise EigensolverError("eigenvectors are not orthonormal")
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def hks(g: GraphSnapshot, t: float) -> dict[int, float]:
    """Heat kernel signature sum_i exp(-t lambda_i) psi_i(v)^2 per node."""
    if g.n_nodes == 0:
        raise ValueError("snapshot has no nodes")
    if not t > 0.0:
        raise ValueError(f"diffusion parameter t must be positive, got {t}")
    spec = spectral_decomposition(g)
    weights = np.exp(-t * spec.eigenvalues)
    values = (spec.eigenvectors**2) @ weights
    return {node: float(values[k]) for k, node in enumerate(g.node_ids)}


# ---------------------------------------------------------------------------
# dispatch


def weigh_edges(g: GraphSnapshot, cfg: WeightFunctionConfig) -> dict[tuple[int, int], float]:
    """Assign a filtration weight to every edge of the snapshot.

    Pure in (snapshot, config); edges are keyed by their canonical (u, v)
    pair with u < v, in sorted order.
    """
    edges = sorted(g.edges, key=lambda e: (e[0], e[1]))
    if cfg.kind == "native":
        out = {(u, v): w for u, v, w in edges}
        if len(out) >= 2 and len(set(out.values())) == 1:
            log.warning(
                "all %d native edge weights are identical; the filtration "
                "degenerates to a single step",
                len(out),
            )
        return out
    if cfg.kind == "max-degree":
        deg = g.degrees()
        return {(u, v): float(max(deg[u], deg[v])) for u, v, _ in edges}
    if cfg.kind == "ricci":
        adj = g.neighbors()
        return {(u, v): _ricci_from_adj(adj, u, v, cfg.ricci_alpha) for u, v, _ in edges}
    # hks
    node_hks = hks(g, cfg.hks_t)
    return {(u, v): max(node_hks[u], node_hks[v]) for u, v, _ in edges}
