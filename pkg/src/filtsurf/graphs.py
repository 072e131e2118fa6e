"""Core graph data model and the on-disk dynamic-graph format.

A dataset directory looks like::

    meta.json            {"classes": {"<graph-id>": <int>, ...}, "format_version": 1}
    graphs/<id>.dg       one file per dynamic graph

``.dg`` files are UTF-8 text, line oriented::

    t <timestep-index>       # begins a snapshot; indices strictly increasing from 0
    v <node-id> <label>      # node declaration, valid until the next "t"
    e <u> <v> <weight>       # edge; u and v must be declared in this snapshot

Comment lines start with ``#``; blank lines are ignored.  Graphs are
undirected and simple: each edge is stored once with u < v, self-loops and
repeated edge lines are hard errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

FORMAT_VERSION = 1


class DatasetError(ValueError):
    """Raised for malformed dataset files or invariant violations."""

    def __init__(self, message: str, *, path: str | Path | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}: "
            if line is not None:
                loc = f"{path}:{line}: "
        super().__init__(f"{loc}{message}")
        self.path = str(path) if path is not None else None
        self.line = line


@dataclass(frozen=True)
class GraphSnapshot:
    """One undirected, node-labelled, edge-weighted graph.

    ``labels`` maps node id to its integer label; ``edges`` holds
    ``(u, v, weight)`` triples with u < v.  Instances are validated on
    construction and treated as immutable afterwards.
    """

    labels: Mapping[int, int]
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for node, label in self.labels.items():
            if node < 0 or label < 0:
                raise DatasetError(f"negative node id or label: v {node} {label}")
        seen: set[tuple[int, int]] = set()
        for u, v, w in self.edges:
            if u == v:
                raise DatasetError(f"self-loop on node {u}")
            if not (u < v):
                raise DatasetError(f"edge ({u}, {v}) not stored with u < v")
            if u not in self.labels or v not in self.labels:
                raise DatasetError(f"edge ({u}, {v}) has an undeclared endpoint")
            if (u, v) in seen:
                raise DatasetError(f"duplicate edge ({u}, {v})")
            if not math.isfinite(w):
                raise DatasetError(f"non-finite weight on edge ({u}, {v}): {w!r}")
            seen.add((u, v))

    @property
    def node_ids(self) -> list[int]:
        return sorted(self.labels)

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    def neighbors(self) -> dict[int, list[int]]:
        """Adjacency lists with neighbours sorted ascending."""
        adj: dict[int, list[int]] = {node: [] for node in self.labels}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj.values():
            lst.sort()
        return adj

    def degrees(self) -> dict[int, int]:
        deg = dict.fromkeys(self.labels, 0)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def snapshot(nodes: Iterable[tuple[int, int]], edges: Iterable[tuple[int, int, float]]) -> GraphSnapshot:
    """Build a snapshot from (id, label) pairs and (u, v, w) triples.

    Edge endpoints are put into canonical u < v order here; everything else
    must already satisfy the snapshot invariants.
    """
    labels = dict(nodes)
    canon = tuple(
        (u, v, float(w)) if u < v else (v, u, float(w)) for u, v, w in edges
    )
    return GraphSnapshot(labels=labels, edges=canon)


@dataclass(frozen=True)
class DynamicGraph:
    """An ordered sequence of snapshots with a class label."""

    graph_id: str
    label: int
    snapshots: tuple[GraphSnapshot, ...]

    def __post_init__(self):
        if not self.snapshots:
            raise DatasetError(f"dynamic graph {self.graph_id!r} has no snapshots")

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass(frozen=True)
class Dataset:
    """A collection of dynamic graphs plus the dataset-wide alphabets."""

    graphs: tuple[DynamicGraph, ...]
    label_alphabet: tuple[int, ...] = field(default=())
    class_alphabet: tuple[int, ...] = field(default=())

    def __post_init__(self):
        ids = [g.graph_id for g in self.graphs]
        if len(set(ids)) != len(ids):
            raise DatasetError("duplicate graph ids in dataset")

    def __len__(self) -> int:
        return len(self.graphs)


def make_dataset(graphs: Iterable[DynamicGraph]) -> Dataset:
    """Assemble a Dataset, sorting graphs by id and deriving the alphabets."""
    ordered = tuple(sorted(graphs, key=lambda g: g.graph_id))
    labels: set[int] = set()
    classes: set[int] = set()
    for g in ordered:
        classes.add(g.label)
        for snap in g.snapshots:
            labels.update(snap.labels.values())
    return Dataset(
        graphs=ordered,
        label_alphabet=tuple(sorted(labels)),
        class_alphabet=tuple(sorted(classes)),
    )


def _parse_int(token: str, what: str, path: Path, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatasetError(f"invalid {what}: {token!r}", path=path, line=lineno) from None


def _parse_weight(token: str, path: Path, lineno: int) -> float:
    try:
        w = float(token)
    except ValueError:
        raise DatasetError(f"invalid weight: {token!r}", path=path, line=lineno) from None
    if not math.isfinite(w):
        raise DatasetError(f"non-finite weight: {token!r}", path=path, line=lineno)
    return w


def parse_dg(path: Path, graph_id: str, label: int) -> DynamicGraph:
    """Parse one ``.dg`` file into a DynamicGraph."""
    snapshots: list[GraphSnapshot] = []
    cur_nodes: dict[int, int] | None = None
    cur_edges: list[tuple[int, int, float]] | None = None
    cur_seen: set[tuple[int, int]] = set()
    expected_t = 0

    def flush():
        if cur_nodes is None:
            return
        try:
            snapshots.append(GraphSnapshot(labels=cur_nodes, edges=tuple(cur_edges)))
        except DatasetError as exc:
            raise DatasetError(str(exc), path=path) from None

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "t":
                if len(parts) != 2:
                    raise DatasetError("expected 't <index>'", path=path, line=lineno)
                idx = _parse_int(parts[1], "timestep index", path, lineno)
                if idx != expected_t:
                    raise DatasetError(
                        f"timestep index {idx}, expected {expected_t}", path=path, line=lineno
                    )
                flush()
                expected_t += 1
                cur_nodes, cur_edges, cur_seen = {}, [], set()
            elif kind == "v":
                if cur_nodes is None:
                    raise DatasetError("'v' line before any 't' line", path=path, line=lineno)
                if len(parts) != 3:
                    raise DatasetError("expected 'v <node-id> <label>'", path=path, line=lineno)
                node = _parse_int(parts[1], "node id", path, lineno)
                lab = _parse_int(parts[2], "node label", path, lineno)
                if node < 0 or lab < 0:
                    raise DatasetError(f"negative node id or label: {line}", path=path, line=lineno)
                if node in cur_nodes:
                    raise DatasetError(f"node {node} declared twice", path=path, line=lineno)
                cur_nodes[node] = lab
            elif kind == "e":
                if cur_nodes is None:
                    raise DatasetError("'e' line before any 't' line", path=path, line=lineno)
                if len(parts) != 4:
                    raise DatasetError("expected 'e <u> <v> <weight>'", path=path, line=lineno)
                u = _parse_int(parts[1], "node id", path, lineno)
                v = _parse_int(parts[2], "node id", path, lineno)
                w = _parse_weight(parts[3], path, lineno)
                if u == v:
                    raise DatasetError(f"self-loop on node {u}", path=path, line=lineno)
                if u not in cur_nodes or v not in cur_nodes:
                    raise DatasetError(
                        f"edge ({u}, {v}) references an undeclared node", path=path, line=lineno
                    )
                key = (min(u, v), max(u, v))
                if key in cur_seen:
                    raise DatasetError(f"duplicate edge ({key[0]}, {key[1]})", path=path, line=lineno)
                cur_seen.add(key)
                cur_edges.append((key[0], key[1], w))
            else:
                raise DatasetError(f"unknown line kind {kind!r}", path=path, line=lineno)
    if cur_nodes is None:
        raise DatasetError("file contains no snapshots", path=path)
    flush()
    return DynamicGraph(graph_id=graph_id, label=label, snapshots=tuple(snapshots))


def format_dg(dg: DynamicGraph) -> str:
    """Canonical text form: nodes sorted by id, edges sorted by (u, v).

    Weights use the shortest representation that round-trips exactly
    (Python's repr), so 6.25 is written as ``6.25``.
    """
    lines: list[str] = []
    for t, snap in enumerate(dg.snapshots):
        lines.append(f"t {t}")
        for node in sorted(snap.labels):
            lines.append(f"v {node} {snap.labels[node]}")
        for u, v, w in sorted(snap.edges, key=lambda e: (e[0], e[1])):
            lines.append(f"e {u} {v} {w!r}")
    return "\n".join(lines) + "\n"


def load_dataset(path: str | Path) -> Dataset:
    """Load a dataset directory, validating every invariant.

    Graphs are ordered lexicographically by graph id.
    """
    root = Path(path)
    meta_path = root / "meta.json"
    if not meta_path.is_file():
        raise DatasetError("meta.json not found", path=meta_path)
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc}", path=meta_path) from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise DatasetError(
            f"unsupported format_version {meta.get('format_version')!r}", path=meta_path
        )
    classes = meta.get("classes")
    if not isinstance(classes, dict):
        raise DatasetError("meta.json must map graph ids to classes", path=meta_path)

    graphs_dir = root / "graphs"
    files = {p.stem: p for p in graphs_dir.glob("*.dg")} if graphs_dir.is_dir() else {}
    missing = sorted(set(classes) - set(files))
    if missing:
        raise DatasetError(f"no .dg file for graph ids: {missing}", path=graphs_dir)
    extra = sorted(set(files) - set(classes))
    if extra:
        raise DatasetError(f".dg files without a class entry: {extra}", path=meta_path)

    graphs = [parse_dg(files[gid], gid, int(classes[gid])) for gid in sorted(classes)]
    return make_dataset(graphs)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """Write a dataset directory in canonical form (save∘load is a fixpoint)."""
    root = Path(path)
    (root / "graphs").mkdir(parents=True, exist_ok=True)
    meta = {
        "classes": {g.graph_id: g.label for g in sorted(ds.graphs, key=lambda g: g.graph_id)},
        "format_version": FORMAT_VERSION,
    }
    (root / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    for g in ds.graphs:
        (root / "graphs" / f"{g.graph_id}.dg").write_text(format_dg(g), encoding="utf-8")
