"""Filtration surfaces: standardized stacks of per-timestep curves.

The curves of a dataset rarely share thresholds, so a single sorted,
deduplicated union of every threshold (the shared weight index) is built
once per dataset.  Standardizing a curve against it forward-fills the
sparse step function into a dense (m x d) matrix; stacking a dynamic
graph's standardized curves gives its surface, a (n_std x m x d) array
that flattens into a comparable feature vector.

On disk a surface stays sparse: ``surfaces/<graph-id>.fsurf`` holds the
raw change points per timestep, and ``index.json`` holds the shared
thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import json

import numpy as np

from .filtration import DescriptorConfig, FiltrationCurve, snapshot_curve
from .graphs import DynamicGraph
from .weights import WeightFunctionConfig


@dataclass(frozen=True, eq=False)
class SharedWeightIndex:
    """Sorted, deduplicated union of all curve thresholds in a dataset."""

    thresholds: np.ndarray  # float64, strictly increasing

    def __post_init__(self):
        if self.thresholds.ndim != 1:
            raise ValueError("index thresholds must be one-dimensional")
        if np.any(np.diff(self.thresholds) <= 0):
            raise ValueError("index thresholds must be strictly increasing")

    @property
    def m(self) -> int:
        return int(self.thresholds.size)


@dataclass(frozen=True, eq=False)
class FiltrationSurface:
    """One dynamic graph's standardized curve stack plus its sparse curves."""

    graph_id: str
    curves: tuple[FiltrationCurve, ...]
    values: np.ndarray  # float64, shape (n_std, m, d)
    n_std: int


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Flattened surfaces as rows, paired with class labels.

    Column (t, j, k) lives at index t*(m*d) + j*d + k.
    """

    X: np.ndarray  # float64, shape (n_graphs, n_std * m * d)
    y: np.ndarray  # int64
    graph_ids: tuple[str, ...]


def build_shared_index(curves: Iterable[FiltrationCurve]) -> SharedWeightIndex:
    """Union of all curve thresholds, sorted and deduplicated."""
    curves = list(curves)
    if not curves:
        raise ValueError("cannot build a shared index from zero curves")
    parts = [np.asarray(c.thresholds, dtype=np.float64) for c in curves]
    merged = np.unique(np.concatenate(parts)) if parts else np.empty(0)
    return SharedWeightIndex(thresholds=merged)


def standardize(curve: FiltrationCurve, idx: SharedWeightIndex) -> np.ndarray:
    """Forward-fill a sparse curve onto the shared index.

    Row j holds the curve value at the largest curve threshold <= idx[j];
    rows before the curve's first threshold are zero.
    """
    m = idx.m
    d = curve.descriptor_dim
    out = np.zeros((m, d), dtype=np.float64)
    if not curve.thresholds:
        return out
    ct = np.asarray(curve.thresholds, dtype=np.float64)
    where = np.searchsorted(idx.thresholds, ct)
    if np.any(where >= m) or np.any(idx.thresholds[np.minimum(where, m - 1)] != ct):
        raise ValueError(
            "curve has thresholds missing from the shared index "
            "(the index was built without this curve)"
        )
    pos = np.searchsorted(ct, idx.thresholds, side="right") - 1
    mask = pos >= 0
    out[mask] = curve.values[pos[mask]].astype(np.float64)
    return out


def assemble_surface_from_curves(graph_id: str, curves: Sequence[FiltrationCurve],
                                 idx: SharedWeightIndex, n_std: int) -> FiltrationSurface:
    """Stack standardized curves, repeating the last one up to n_std slices."""
    n = len(curves)
    if n == 0:
        raise ValueError("a surface needs at least one curve")
    if n_std < n:
        raise ValueError(f"n_std={n_std} is shorter than the graph ({n} timesteps)")
    slices = [standardize(c, idx) for c in curves]
    slices.extend([slices[-1]] * (n_std - n))
    values = np.stack(slices, axis=0)
    return FiltrationSurface(graph_id=graph_id, curves=tuple(curves), values=values, n_std=n_std)


def assemble_surface(dg: DynamicGraph, weight_cfg: WeightFunctionConfig,
                     desc: DescriptorConfig, idx: SharedWeightIndex,
                     n_std: int) -> FiltrationSurface:
    """Compute the curves of every snapshot and assemble the surface."""
    curves = [snapshot_curve(snap, weight_cfg, desc) for snap in dg.snapshots]
    return assemble_surface_from_curves(dg.graph_id, curves, idx, n_std)


def vectorize(s: FiltrationSurface) -> np.ndarray:
    """Flatten time-major, then threshold, then descriptor dimension."""
    return s.values.reshape(-1).copy()


def append_timestep(s: FiltrationSurface, new_curve: FiltrationCurve,
                    idx: SharedWeightIndex) -> tuple[FiltrationSurface, SharedWeightIndex]:
    """Append one timestep online, growing the shared index as needed.

    Existing time slices gain forward-filled columns at inserted
    thresholds; the result equals a from-scratch rebuild over the enlarged
    curve set.  Only unpadded surfaces (n_std == number of curves) can be
    extended this way.
    """
    if s.n_std != len(s.curves):
        raise ValueError("append_timestep needs an unpadded surface")
    new_thr = np.union1d(idx.thresholds, np.asarray(new_curve.thresholds, dtype=np.float64))
    new_idx = SharedWeightIndex(thresholds=new_thr)
    d = s.values.shape[2]
    pos = np.searchsorted(idx.thresholds, new_thr, side="right") - 1
    expanded = np.zeros((s.n_std, new_thr.size, d), dtype=np.float64)
    mask = pos >= 0
    expanded[:, mask, :] = s.values[:, pos[mask], :]
    new_slice = standardize(new_curve, new_idx)
    values = np.concatenate([expanded, new_slice[None, :, :]], axis=0)
    surface = FiltrationSurface(
        graph_id=s.graph_id,
        curves=s.curves + (new_curve,),
        values=values,
        n_std=s.n_std + 1,
    )
    return surface, new_idx


def build_feature_matrix(surfaces: Sequence[FiltrationSurface],
                         classes: Mapping[str, int]) -> FeatureMatrix:
    """One flattened row per surface, ordered by graph id."""
    ordered = sorted(surfaces, key=lambda s: s.graph_id)
    if not ordered:
        raise ValueError("no surfaces to vectorize")
    rows = [vectorize(s) for s in ordered]
    lengths = {r.size for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"surfaces disagree on feature length: {sorted(lengths)}")
    X = np.stack(rows, axis=0)
    y = np.array([classes[s.graph_id] for s in ordered], dtype=np.int64)
    return FeatureMatrix(X=X, y=y, graph_ids=tuple(s.graph_id for s in ordered))


# ---------------------------------------------------------------------------
# serialization


def format_surface(s: FiltrationSurface) -> str:
    """Sparse text form: ``n d`` header, then per-timestep change points."""
    d = s.values.shape[2]
    lines = [f"{len(s.curves)} {d}"]
    for t, curve in enumerate(s.curves):
        lines.append(f"t {t}")
        for thr, row in zip(curve.thresholds, curve.values):
            lines.append(f"{thr!r} " + " ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"

def save_surface(path: str | Path, s: FiltrationSurface) -> None:
    Path(path).write_text(format_surface(s), encoding="utf-8")


def load_curves(path: str | Path) -> tuple[int, int, list[FiltrationCurve]]:
    """Read a ``.fsurf`` file back into (n_timesteps, d, curves)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    n, d = (int(tok) for tok in lines[0].split())
    curves: list[FiltrationCurve] = []
    thresholds: list[float] = []
    rows: list[list[int]] = []

    def flush():
        values = np.array(rows, dtype=np.int64).reshape(len(rows), d)
        curves.append(FiltrationCurve(
            thresholds=tuple(thresholds), values=values, descriptor_dim=d
        ))

    started = False
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "t":
            if started:
                flush()
            thresholds, rows = [], []
            started = True
        else:
            thresholds.append(float(parts[0]))
            rows.append([int(tok) for tok in parts[1:]])
    if started:
        flush()
    if len(curves) != n:
        raise ValueError(f"{path}: header says {n} timesteps, found {len(curves)}")
    return n, d, curves


def save_index(path: str | Path, idx: SharedWeightIndex) -> None:
    payload = {"format_version": 1, "thresholds": [float(x) for x in idx.thresholds]}
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_index(path: str | Path) -> SharedWeightIndex:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return SharedWeightIndex(thresholds=np.asarray(payload["thresholds"], dtype=np.float64))
