# cython: boundscheck=False, wraparound=False, cdivision=True
# Compiled hot loops.  Semantics (including float operation order and all
# tie-breaking) must stay bit-identical to kernels/pure.py.

import numpy as np

from libc.math cimport INFINITY
from libc.stdint cimport int64_t, uint8_t


def component_counts(Py_ssize_t n_nodes, int64_t[::1] eu, int64_t[::1] ev,
                     int64_t[::1] batch_starts, bint start_all):
    cdef Py_ssize_t m = batch_starts.shape[0] - 1
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] out_v = out
    parent_arr = np.arange(n_nodes, dtype=np.int64)
    cdef int64_t[::1] parent = parent_arr
    if start_all:
        appeared_arr = np.ones(n_nodes, dtype=np.uint8)
    else:
        appeared_arr = np.zeros(n_nodes, dtype=np.uint8)
    cdef uint8_t[::1] appeared = appeared_arr
    cdef int64_t comps = n_nodes if start_all else 0
    cdef Py_ssize_t b, k
    cdef int64_t u, v
    for b in range(m):
        for k in range(batch_starts[b], batch_starts[b + 1]):
            u = eu[k]
            v = ev[k]
            if not appeared[u]:
                appeared[u] = 1
                comps += 1
            if not appeared[v]:
                appeared[v] = 1
                comps += 1
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            if u != v:
                parent[v] = u
                comps -= 1
        out_v[b] = comps
    return out


def label_histograms(int64_t[::1] label_idx, int64_t[::1] eu, int64_t[::1] ev,
                     int64_t[::1] batch_starts, Py_ssize_t n_labels, bint start_all):
    cdef Py_ssize_t n_nodes = label_idx.shape[0]
    cdef Py_ssize_t m = batch_starts.shape[0] - 1
    hist_arr = np.zeros(n_labels, dtype=np.int64)
    cdef int64_t[::1] hist = hist_arr
    appeared_arr = np.zeros(n_nodes, dtype=np.uint8)
    cdef uint8_t[::1] appeared = appeared_arr
    cdef Py_ssize_t node
    if start_all:
        for node in range(n_nodes):
            appeared[node] = 1
            hist[label_idx[node]] += 1
    out = np.empty((m, n_labels), dtype=np.int64)
    cdef int64_t[:, ::1] out_v = out
    cdef Py_ssize_t b, k, c
    cdef int64_t u, v
    for b in range(m):
        for k in range(batch_starts[b], batch_starts[b + 1]):
            u = eu[k]
            v = ev[k]
            if not appeared[u]:
                appeared[u] = 1
                hist[label_idx[u]] += 1
            if not appeared[v]:
                appeared[v] = 1
                hist[label_idx[v]] += 1
        for c in range(n_labels):
            out_v[b, c] = hist[c]
    return out


def best_split(double[:, ::1] X, int64_t[::1] y, int64_t[::1] rows, int64_t[::1] cols,
               Py_ssize_t n_classes, Py_ssize_t budget):
    cdef Py_ssize_t s = rows.shape[0]
    cdef Py_ssize_t nf = cols.shape[0]
    vals_arr = np.empty(s, dtype=np.float64)
    cdef double[::1] vals = vals_arr
    svals_arr = np.empty(s, dtype=np.float64)
    cdef double[::1] svals = svals_arr
    sy_arr = np.empty(s, dtype=np.int64)
    cdef int64_t[::1] sy = sy_arr
    cnt_arr = np.empty(n_classes, dtype=np.int64)
    cdef int64_t[::1] cnt_left = cnt_arr
    tot_arr = np.empty(n_classes, dtype=np.int64)
    cdef int64_t[::1] tot = tot_arr
    cdef int64_t[::1] order_v
    cdef double best_score = INFINITY
    cdef int64_t best_feat = -1
    cdef double best_thr = 0.0
    cdef Py_ssize_t evaluated = 0
    cdef Py_ssize_t fi, i, c
    cdef int64_t f, n_left, n_right, sq_left, sq_right, r
    cdef double lo, hi, score, thr, feat_score, feat_thr
    for fi in range(nf):
        if evaluated >= budget:
            break
        f = cols[fi]
        lo = X[rows[0], f]
        hi = lo
        for i in range(s):
            vals[i] = X[rows[i], f]
            if vals[i] < lo:
                lo = vals[i]
            if vals[i] > hi:
                hi = vals[i]
        if lo == hi:
            continue
        evaluated += 1
        order = np.argsort(vals_arr)
        order_v = order
        for c in range(n_classes):
            cnt_left[c] = 0
            tot[c] = 0
        for i in range(s):
            svals[i] = vals[order_v[i]]
            sy[i] = y[rows[order_v[i]]]
            tot[sy[i]] += 1
        feat_score = INFINITY
        feat_thr = 0.0
        for i in range(s - 1):
            cnt_left[sy[i]] += 1
            if svals[i] == svals[i + 1]:
                continue
            n_left = i + 1
            n_right = s - n_left
            sq_left = 0
            sq_right = 0
            for c in range(n_classes):
                sq_left += cnt_left[c] * cnt_left[c]
                r = tot[c] - cnt_left[c]
                sq_right += r * r
            score = ((<double> n_left) - (<double> sq_left) / (<double> n_left)) \
                + ((<double> n_right) - (<double> sq_right) / (<double> n_right))
            if score < feat_score:
                feat_score = score
                feat_thr = (svals[i] + svals[i + 1]) / 2.0
        if feat_score < best_score or (
            feat_score == best_score
            and (f < best_feat or (f == best_feat and feat_thr < best_thr))
        ):
            best_score = feat_score
            best_feat = f
            best_thr = feat_thr
    return int(best_feat), float(best_thr)
