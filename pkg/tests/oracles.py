"""Independent reference implementations used to pin expected values.

Nothing here shares code with the library paths it checks: transport goes
through scipy's LP solver, hop distances through scipy.sparse.csgraph,
eigenvalues through an exact characteristic polynomial, and descriptor
values through from-scratch BFS recomputation.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from filtsurf.graphs import GraphSnapshot


def lp_transport(mu_mass, nu_mass, cost) -> float:
    """Exact transportation optimum via scipy's HiGHS LP solver."""
    cost = np.asarray(cost, dtype=np.float64)
    r, c = cost.shape
    a_eq = np.zeros((r + c, r * c))
    for i in range(r):
        a_eq[i, i * c:(i + 1) * c] = 1.0
    for j in range(c):
        a_eq[r + j, j::c] = 1.0
    b_eq = np.concatenate([np.asarray(mu_mass, float), np.asarray(nu_mass, float)])
    res = linprog(cost.reshape(-1), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


def hop_distance_matrix(g: GraphSnapshot) -> tuple[list[int], np.ndarray]:
    ids = g.node_ids
    index = {node: k for k, node in enumerate(ids)}
    n = len(ids)
    rows, cols = [], []
    for u, v, _ in g.edges:
        rows += [index[u], index[v]]
        cols += [index[v], index[u]]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return ids, shortest_path(adj, method="BF", unweighted=True)


def lp_ricci(g: GraphSnapshot, x: int, y: int, alpha: float) -> float:
    """Curvature from scratch: scipy shortest paths + scipy LP transport."""
    ids, dist = hop_distance_matrix(g)
    index = {node: k for k, node in enumerate(ids)}
    adj: dict[int, list[int]] = {node: [] for node in ids}
    for u, v, _ in g.edges:
        adj[u].append(v)
        adj[v].append(u)

    def measure(node):
        nbrs = sorted(adj[node])
        support = [node] + nbrs
        mass = [alpha] + [(1.0 - alpha) / len(nbrs)] * len(nbrs)
        return support, mass

    sup_x, mass_x = measure(x)
    sup_y, mass_y = measure(y)
    cost = np.array([[dist[index[a], index[b]] for b in sup_y] for a in sup_x])
    w = lp_transport(mass_x, mass_y, cost)
    return 1.0 - w / dist[index[x], index[y]]


def charpoly_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues via the characteristic polynomial.

    Coefficients come from the Faddeev-LeVerrier recurrence in exact
    rational arithmetic; the roots from numpy's companion-matrix solver.
    Only sensible for small matrices.
    """
    n = matrix.shape[0]
    a = [[Fraction(int(x)) for x in row] for row in matrix]
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        am = [
            [sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
        ck = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(ck)
        m = [
            [am[i][j] + (ck if i == j else Fraction(0)) for j in range(n)]
            for i in range(n)
        ]
    roots = np.roots([float(c) for c in coeffs])
    return np.sort(roots.real)


def bfs_component_count(nodes: set[int], edges: list[tuple[int, int]]) -> int:
    """Fresh BFS over the given node set; no union-find involved."""
    adj: dict[int, list[int]] = {n: [] for n in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    comps = 0
    for start in sorted(nodes):
        if start in seen:
            continue
        comps += 1
        stack = [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return comps


def descriptor_at_threshold(g: GraphSnapshot, threshold: float,
                            weights: dict[tuple[int, int], float],
                            kind: str, alphabet: tuple[int, ...] = (),
                            include_isolated: bool = False) -> np.ndarray:
    """Recompute one descriptor value from scratch at a given threshold."""
    active = [(u, v) for (u, v), w in weights.items() if w <= threshold]
    appeared: set[int] = set()
    for u, v in active:
        appeared.add(u)
        appeared.add(v)
    if include_isolated and active:
        appeared = set(g.labels)
    if kind == "component-count":
        return np.array([bfs_component_count(appeared, active)], dtype=np.int64)
    hist = np.zeros(len(alphabet), dtype=np.int64)
    pos = {lab: i for i, lab in enumerate(alphabet)}
    for node in appeared:
        hist[pos[g.labels[node]]] += 1
    return hist
