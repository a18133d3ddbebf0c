"""Compiled batch kernels over :class:`~eulergibbs.digraph.CompiledGraph` arrays.

Every kernel seeds numba's per-thread generator with the chunk seed it is
given, so a chunk's output depends only on that seed.  Vertex and edge
arguments are dense indices.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .rng import chunks, n_threads as _n_threads

# flags for wilson_infinity outputs
UNSET = 0
EXACT = 1
TRUNCATED = 2


def run_chunked(fn, n_samples, n_threads=None):
    """Run ``fn(chunk_index, chunk_len)`` over all chunks; results in chunk order."""
    jobs = [(c, stop - start) for c, start, stop in chunks(n_samples)]
    workers = min(_n_threads(n_threads), len(jobs)) if jobs else 1
    if workers <= 1:
        parts = [fn(c, n) for c, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda job: fn(*job), jobs))
    if not parts:
        return parts
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


@njit(cache=True, nogil=True)
def _step(v, out_off, out_edges):
    d = out_off[v + 1] - out_off[v]
    if d == 0:
        return -1
    return out_edges[out_off[v] + int(np.random.random() * d)]


@njit(cache=True, nogil=True)
def return_count(seed, n, out_off, out_edges, head, o, horizon):
    np.random.seed(seed)
    hits = np.zeros(n, np.uint8)
    for s in range(n):
        v = o
        for _ in range(horizon):
            e = _step(v, out_off, out_edges)
            if e < 0:
                break
            v = head[e]
            if v == o:
                hits[s] = 1
                break
    return hits


@njit(cache=True, nogil=True)
def _wilson_finite_one(out_off, out_edges, head, root, order, in_tree, nxt):
    in_tree[:] = False
    in_tree[root] = True
    for u in order:
        v = u
        while not in_tree[v]:
            e = _step(v, out_off, out_edges)
            nxt[v] = e
            v = head[e]
        v = u
        while not in_tree[v]:
            in_tree[v] = True
            v = head[nxt[v]]
    nxt[root] = -1


@njit(cache=True, nogil=True)
def wilson_finite(seed, n, out_off, out_edges, head, root, order):
    """Uniform spanning in-arborescences rooted at ``root``: rows of out-edge per vertex."""
    np.random.seed(seed)
    nv = out_off.shape[0] - 1
    res = np.empty((n, nv), np.int64)
    in_tree = np.zeros(nv, np.bool_)
    nxt = np.full(nv, -1, np.int64)
    for s in range(n):
        _wilson_finite_one(out_off, out_edges, head, root, order, in_tree, nxt)
        res[s, :] = nxt
    return res


@njit(cache=True, nogil=True)
def _shuffle_prefix(buf, lo, k):
    for i in range(k - 1, 0, -1):
        j = int(np.random.random() * (i + 1))
        t = buf[lo + i]
        buf[lo + i] = buf[lo + j]
        buf[lo + j] = t


@njit(cache=True, nogil=True)
def _fill_stack(v, bottom, out_off, out_edges, buf):
    """Out-edges of ``v`` in uniform order, ``bottom`` (if >= 0) last."""
    lo = out_off[v]
    d = out_off[v + 1] - lo
    for i in range(d):
        buf[lo + i] = out_edges[lo + i]
    if bottom >= 0:
        for i in range(d):
            if buf[lo + i] == bottom:
                buf[lo + i] = buf[lo + d - 1]
                buf[lo + d - 1] = bottom
                break
        _shuffle_prefix(buf, lo, d - 1)
    else:
        _shuffle_prefix(buf, lo, d)


@njit(cache=True, nogil=True)
def euler_finite(seed, n, out_off, out_edges, head, source, sink, order, m):
    """Uniform Eulerian paths source -> sink as rows of ``m`` edge indices."""
    np.random.seed(seed)
    nv = out_off.shape[0] - 1
    res = np.full((n, m), -1, np.int64)
    in_tree = np.zeros(nv, np.bool_)
    nxt = np.full(nv, -1, np.int64)
    buf = np.empty(out_edges.shape[0], np.int64)
    pos = np.zeros(nv, np.int64)
    for s in range(n):
        _wilson_finite_one(out_off, out_edges, head, sink, order, in_tree, nxt)
        for v in range(nv):
            _fill_stack(v, nxt[v], out_off, out_edges, buf)
            pos[v] = 0
        v = source
        for t in range(m):
            if pos[v] == out_off[v + 1] - out_off[v]:
                break
            e = buf[out_off[v] + pos[v]]
            pos[v] += 1
            res[s, t] = e
            v = head[e]
    return res


@njit(cache=True, nogil=True)
def _wilson_inf_walk(u, horizon, out_off, out_edges, head, stamp, tree, edge, flag,
                     lastv, lastt, nxt):
    """One step of Wilson rooted at infinity from ``u``; returns True if it hit the tree."""
    v = u
    t = 0
    while t < horizon and tree[v] != stamp:
        e = _step(v, out_off, out_edges)
        if e < 0:
            break
        lastt[v] = t
        nxt[v] = e
        v = head[e]
        t += 1
    hit = tree[v] == stamp
    end = v
    x = u
    while x != end and tree[x] != stamp:
        tree[x] = stamp
        edge[x] = nxt[x]
        flag[x] = EXACT if hit else TRUNCATED
        lastv[x] = lastt[x]
        x = head[nxt[x]]
    return hit


@njit(cache=True, nogil=True)
def wilson_infinity(seed, n, out_off, out_edges, head, seeds, horizon, record):
    """Wilson rooted at infinity with walks capped at ``horizon`` steps.

    Returns, for the ``record`` vertices, the arboretum out-edge (-1 if
    unset), its flag and the last-visit time of the walk that set it.
    """
    np.random.seed(seed)
    nv = out_off.shape[0] - 1
    r = record.shape[0]
    res_e = np.full((n, r), -1, np.int64)
    res_f = np.zeros((n, r), np.uint8)
    res_t = np.full((n, r), -1, np.int64)
    tree = np.zeros(nv, np.int64)
    edge = np.full(nv, -1, np.int64)
    flag = np.zeros(nv, np.uint8)
    lastv = np.zeros(nv, np.int64)
    lastt = np.zeros(nv, np.int64)
    nxt = np.full(nv, -1, np.int64)
    for s in range(n):
        stamp = s + 1
        for u in seeds:
            if tree[u] == stamp:
                continue
            _wilson_inf_walk(u, horizon, out_off, out_edges, head, stamp, tree, edge, flag,
                             lastv, lastt, nxt)
        for i in range(r):
            v = record[i]
            if tree[v] == stamp:
                res_e[s, i] = edge[v]
                res_f[s, i] = flag[v]
                res_t[s, i] = lastv[v]
    return res_e, res_f, res_t


@njit(cache=True, nogil=True)
def gibbs_prefix(seed, n, out_off, out_edges, head, source, k, horizon, settle):
    """Follow lazily built stacks whose bottoms come from Wilson rooted at infinity.

    Returns the edge rows (``-1`` padded), the number of steps taken, the
    number of materialized stacks whose bottom came from a truncated walk, and
    a taint flag set when such a bottom was last visited fewer than ``settle``
    steps before the horizon (or no bottom could be assigned).
    """
    np.random.seed(seed)
    nv = out_off.shape[0] - 1
    res = np.full((n, k), -1, np.int64)
    steps = np.zeros(n, np.int64)
    ntrunc = np.zeros(n, np.int64)
    taint = np.zeros(n, np.bool_)
    tree = np.zeros(nv, np.int64)
    edge = np.full(nv, -1, np.int64)
    flag = np.zeros(nv, np.uint8)
    lastv = np.zeros(nv, np.int64)
    lastt = np.zeros(nv, np.int64)
    nxt = np.full(nv, -1, np.int64)
    mat = np.zeros(nv, np.int64)
    pos = np.zeros(nv, np.int64)
    buf = np.empty(out_edges.shape[0], np.int64)
    for s in range(n):
        stamp = s + 1
        v = source
        for t in range(k):
            if mat[v] != stamp:
                if tree[v] != stamp:
                    _wilson_inf_walk(v, horizon, out_off, out_edges, head, stamp, tree,
                                     edge, flag, lastv, lastt, nxt)
                if tree[v] == stamp:
                    _fill_stack(v, edge[v], out_off, out_edges, buf)
                    if flag[v] == TRUNCATED:
                        ntrunc[s] += 1
                        if horizon - lastv[v] < settle:
                            taint[s] = True
                else:
                    _fill_stack(v, -1, out_off, out_edges, buf)
                    ntrunc[s] += 1
                    taint[s] = True
                mat[v] = stamp
                pos[v] = 0
            if pos[v] == out_off[v + 1] - out_off[v]:
                break
            e = buf[out_off[v] + pos[v]]
            pos[v] += 1
            res[s, t] = e
            steps[s] = t + 1
            v = head[e]
    return res, steps, ntrunc, taint
