"""Pure-Python kernel implementations.

These mirror the compiled extension in ``_core.pyx`` operation for
operation, so both backends produce bit-identical results.  Keep the two
files in sync when touching either.
"""

from __future__ import annotations

import math

import numpy as np


def component_counts(n_nodes, eu, ev, batch_starts, start_all):
    """Connected-component counts after each edge batch.

    Nodes count only once they have appeared (been touched by an edge),
    unless ``start_all`` pre-seeds every node as a singleton component.
    """
    m = len(batch_starts) - 1
    parent = list(range(n_nodes))
    if start_all:
        appeared = bytearray([1]) * n_nodes
        comps = n_nodes
    else:
        appeared = bytearray(n_nodes)
        comps = 0
    out = np.empty(m, dtype=np.int64)
    for b in range(m):
        for k in range(batch_starts[b], batch_starts[b + 1]):
            u = int(eu[k])
            v = int(ev[k])
            if not appeared[u]:
                appeared[u] = 1
                comps += 1
            if not appeared[v]:
                appeared[v] = 1
                comps += 1
            # find with path halving
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            if u != v:
                parent[v] = u
                comps -= 1
        out[b] = comps
    return out


def label_histograms(label_idx, eu, ev, batch_starts, n_labels, start_all):
    """Cumulative per-label counts of appeared nodes after each edge batch."""
    n_nodes = len(label_idx)
    m = len(batch_starts) - 1
    if start_all:
        appeared = bytearray([1]) * n_nodes
        hist = np.bincount(np.asarray(label_idx), minlength=n_labels).astype(np.int64)
    else:
        appeared = bytearray(n_nodes)
        hist = np.zeros(n_labels, dtype=np.int64)
    out = np.empty((m, n_labels), dtype=np.int64)
    for b in range(m):
        for k in range(batch_starts[b], batch_starts[b + 1]):
            u = int(eu[k])
            v = int(ev[k])
            if not appeared[u]:
                appeared[u] = 1
                hist[label_idx[u]] += 1
            if not appeared[v]:
                appeared[v] = 1
                hist[label_idx[v]] += 1
        out[b] = hist
    return out


def best_split(X, y, rows, cols, n_classes, budget):
    """Best Gini split over the candidate features in ``cols``.

    Walks ``cols`` in order, skipping features that are constant on the
    node (they do not consume the budget), and evaluates non-constant ones
    until ``budget`` of them have been scored.  Ties are broken by lowest
    feature index, then lowest threshold.  Returns ``(-1, 0.0)`` when every
    candidate feature is constant.
    """
    s = rows.shape[0]
    yr = y[rows]
    class_range = np.arange(n_classes, dtype=np.int64)
    best_score = math.inf
    best_feat = -1
    best_thr = 0.0
    evaluated = 0
    for f in cols:
        if evaluated >= budget:
            break
        vals = X[rows, f]
        order = np.argsort(vals)
        sv = vals[order]
        if sv[0] == sv[-1]:
            continue
        evaluated += 1
        sy = yr[order]
        onehot = (sy[:, None] == class_range[None, :]).astype(np.int64)
        cum = np.cumsum(onehot, axis=0)
        cut = np.nonzero(sv[:-1] != sv[1:])[0]
        n_left = (cut + 1).astype(np.int64)
        n_right = s - n_left
        cnt_left = cum[cut]
        cnt_right = cum[-1][None, :] - cnt_left
        sq_left = np.sum(cnt_left * cnt_left, axis=1)
        sq_right = np.sum(cnt_right * cnt_right, axis=1)
        # s * weighted-Gini of the children; all-integer until the divisions
        score = (n_left - sq_left / n_left) + (n_right - sq_right / n_right)
        j = int(np.argmin(score))
        sc = float(score[j])
        thr = (sv[cut[j]] + sv[cut[j] + 1]) / 2.0
        fi = int(f)
        if sc < best_score or (
            sc == best_score and (fi < best_feat or (fi == best_feat and thr < best_thr))
        ):
            best_score = sc
            best_feat = fi
            best_thr = float(thr)
    return best_feat, best_thr
