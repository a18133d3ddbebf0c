"""Wilson's algorithm rooted at a vertex and rooted at infinity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arborescence import InArboretum
from .digraph import BOUNDARY, Digraph, LazyDigraph, contract_boundary, sort_key
from .errors import RootUnreachable
from .rng import as_generator, base_seed, kernel_seed, make_rng
from .walks import FixedLength, HitSet, Path, loop_erase, random_walk

EXACT = "exact"
TRUNCATED = "truncated"


def _check_root(g: Digraph, z):
    reach = g.reachable_from(z, reverse=True)
    for v in g.sorted_vertices():
        if v not in reach:
            raise RootUnreachable(f"vertex {v!r} has no directed path to {z!r}", v)


def _full_order(g: Digraph, z, order):
    order = [] if order is None else list(order)
    seen = set(order)
    return order + [v for v in g.sorted_vertices() if v not in seen and v != z]


def wilson_finite(g: Digraph, z, order=None, rng=None) -> InArboretum:
    """Uniform spanning in-arborescence of ``g`` rooted at ``z``.

    Loop-erased walks from the vertices of ``order`` (then any remaining
    vertices, by id) are attached to the growing arborescence.
    """
    _check_root(g, z)
    rng = as_generator(rng)
    in_tree = {z}
    edges = {}
    for u in _full_order(g, z, order):
        if u in in_tree:
            continue
        branch = loop_erase(random_walk(g, u, HitSet(in_tree), rng))
        for v, e, h in zip(branch.vertices, branch.edges, branch.vertices[1:]):
            edges[e] = (v, h)
            in_tree.add(v)
    return InArboretum(edges, frozenset(g.vertices), root=z)


def wilson_finite_batch(g: Digraph, z, n_samples: int, order=None, random_state=None,
                        n_threads=None) -> np.ndarray:
    """``n_samples`` arborescences as rows of compiled edge indices (``-1`` at ``z``).

    Column ``i`` is vertex ``g.compiled.vertex_ids[i]``; decode with
    :func:`decode_arborescence`.
    """
    _check_root(g, z)
    cg = g.compiled
    idx = np.array([cg.index[v] for v in _full_order(g, z, order)], dtype=np.int64)
    root = cg.index[z]
    seed = base_seed(random_state)
    return _kernels.run_chunked(
        lambda c, n: _kernels.wilson_finite(kernel_seed(seed, c), n, cg.out_off,
                                            cg.out_edges, cg.head, root, idx),
        n_samples, n_threads)


def decode_arborescence(g: Digraph, row) -> frozenset:
    cg = g.compiled
    return frozenset(cg.edge_ids[j] for j in row if j >= 0)


def encode_arborescence(g: Digraph, edges) -> np.ndarray:
    """Inverse of :func:`decode_arborescence`."""
    cg = g.compiled
    row = np.full(cg.n_vertices, -1, dtype=np.int64)
    for e in edges:
        j = cg.edge_index[e]
        row[cg.tail[j]] = j
    return row


# ------------------------------------------------------------ rooted at infinity


@dataclass(frozen=True)
class PartialArboretum:
    """Output of Wilson rooted at infinity run with a step horizon.

    ``flags[v]`` is ``"exact"`` when the walk that set ``v``'s edge hit the
    existing arboretum and ``"truncated"`` when it was stopped by the horizon.
    ``last_visit[v]`` is the step of that walk's final visit to ``v``; a large
    ``horizon - last_visit`` means the walk moved on long before it was cut.
    """

    edges: dict
    flags: dict
    last_visit: dict
    horizon: int

    def edge_of(self, v):
        for e, (t, _) in self.edges.items():
            if t == v:
                return e
        return None

    def margin(self, v):
        if self.flags.get(v) != TRUNCATED:
            return None
        return self.horizon - self.last_visit[v]

    def truncated_vertices(self):
        return sorted((v for v, f in self.flags.items() if f == TRUNCATED), key=sort_key)

    def to_json(self):
        return {"edges": sorted(self.edges, key=sort_key),
                "flags": {str(v): f for v, f in sorted(self.flags.items(),
                                                        key=lambda kv: sort_key(kv[0]))},
                "horizon": self.horizon}


class _InfiniteWilson:
    """Incremental Wilson rooted at infinity; seeds may be added adaptively."""

    def __init__(self, g, horizon, rng):
        self.g = g
        self.horizon = horizon
        self.rng = rng
        self.out = {}        # vertex -> (edge, head)
        self.flags = {}
        self.last_visit = {}

    def attach(self, u):
        if u in self.out:
            return
        walk = random_walk(self.g, u, HitSet(self.out), self.rng, max_steps=self.horizon)
        hit = walk.end in self.out
        last = {}
        for t, v in enumerate(walk.vertices[:-1]):
            last[v] = t
        branch = loop_erase(walk)
        for v, e, h in zip(branch.vertices, branch.edges, branch.vertices[1:]):
            self.out[v] = (e, h)
            self.flags[v] = EXACT if hit else TRUNCATED
            self.last_visit[v] = last[v]

    def result(self):
        edges = {e: (v, h) for v, (e, h) in self.out.items()}
        return PartialArboretum(edges, dict(self.flags), dict(self.last_visit), self.horizon)


def wilson_infinity(g, seeds, horizon: int, rng=None) -> PartialArboretum:
    """Wilson rooted at infinity from ``seeds``, each walk capped at ``horizon`` steps.

    A walk that has not hit the arboretum after ``horizon`` steps contributes
    the loop-erasure of what it walked, flagged ``truncated``; its endpoint is
    left without an edge.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    w = _InfiniteWilson(g, horizon, as_generator(rng))
    for u in seeds:
        w.attach(u)
    return w.result()


@dataclass(frozen=True)
class InfinityBatch:
    """Batch output of :func:`wilson_infinity_batch` for the recorded vertices."""

    vertices: list
    edges: np.ndarray       # compiled edge index per (sample, vertex), -1 if unset
    flags: np.ndarray       # 0 unset, 1 exact, 2 truncated
    last_visit: np.ndarray
    horizon: int
    graph: object

    def edge_ids(self, i):
        cg = self.graph
        return [cg.edge_ids[j] if j >= 0 else None for j in self.edges[:, i]]

    def inclusion(self, edge_ids):
        """Indicator per sample that all ``edge_ids`` are in the arboretum."""
        cg = self.graph
        col = {v: i for i, v in enumerate(self.vertices)}
        ok = np.ones(self.edges.shape[0], dtype=bool)
        for e in edge_ids:
            j = cg.edge_index[e]
            v = cg.vertex_ids[cg.tail[j]]
            ok &= self.edges[:, col[v]] == j
        return ok


def wilson_infinity_batch(g: LazyDigraph, seeds, horizon: int, n_samples: int,
                          record=None, random_state=None, n_threads=None) -> InfinityBatch:
    """Compiled batch version of :func:`wilson_infinity` on a lazy graph."""
    seeds = list(seeds)
    record = seeds if record is None else list(record)
    depth = _max_depth(g, seeds + record)
    cg = g.compile_ball([g.source], depth + horizon)
    for v in seeds + record:
        if v not in cg.index:
            raise KeyError(f"{v!r} is not reachable from the source")
    sidx = np.array([cg.index[v] for v in seeds], dtype=np.int64)
    ridx = np.array([cg.index[v] for v in record], dtype=np.int64)
    seed = base_seed(random_state)
    e, f, t = _kernels.run_chunked(
        lambda c, n: _kernels.wilson_infinity(kernel_seed(seed, c), n, cg.out_off,
                                              cg.out_edges, cg.head, sidx, horizon, ridx),
        n_samples, n_threads)
    return InfinityBatch(record, e, f, t, horizon, cg)


def _max_depth(g: LazyDigraph, vertices, limit=10**6):
    """Largest BFS distance from the source among ``vertices``."""
    want = set(vertices)
    dist = {g.source: 0}
    frontier = [g.source]
    found = {g.source} & want
    d = 0
    while found != want and frontier and d < limit:
        d += 1
        nxt = []
        for v in frontier:
            for _, h in g.out_edges(v):
                if h not in dist:
                    dist[h] = d
                    nxt.append(h)
                    if h in want:
                        found.add(h)
        frontier = nxt
    if found != want:
        raise KeyError(f"vertices {sorted(want - found, key=sort_key)!r} not reachable")
    return max(dist[v] for v in want)


# ----------------------------------------------------------------- exhaustions


def sample_ua_exhaustion(g: LazyDigraph, n: int, rng=None, order=None) -> InArboretum:
    """Uniform spanning in-arborescence of ``G_n^*`` rooted at the boundary."""
    c = contract_boundary(g, n)
    return wilson_finite(c.graph, BOUNDARY, order=order, rng=rng)


def sample_ua_exhaustion_batch(g: LazyDigraph, n: int, n_samples: int, order=None,
                               random_state=None, n_threads=None):
    """Batch version; returns ``(contraction, rows)`` as for :func:`wilson_finite_batch`."""
    c = contract_boundary(g, n)
    rows = wilson_finite_batch(c.graph, BOUNDARY, n_samples, order=order,
                               random_state=random_state, n_threads=n_threads)
    return c, rows


def wilson_coupled(g: LazyDigraph, seeds, volumes, horizon: int, seed: int = 0) -> dict:
    """Drive the finite-volume and rooted-at-infinity samplers from the same walks.

    Walk ``i`` starts at ``seeds[i]`` and is drawn from stream ``i`` of
    ``seed``.  For each ``n`` in ``volumes`` the walks are stopped on leaving
    ``V_n`` (the boundary is wired into the arborescence from the start);
    under key ``"inf"`` they are stopped by the horizon instead.  Returns
    ``{n: {vertex: edge}, ..., "inf": PartialArboretum}`` restricted to the
    seeds' futures.
    """
    seeds = list(seeds)
    # one horizon-long walk per seed, replayed by every volume
    walks = [random_walk(g, u, FixedLength(horizon), make_rng(seed, i))
             for i, u in enumerate(seeds)]
    out = {}
    for n in volumes:
        inner = g.exhaustion(n)
        out[n] = _replay(walks, lambda tree, v, inner=inner: v not in inner or v in tree)
    tree_inf = _replay(walks, lambda tree, v: v in tree, keep_flags=True, horizon=horizon)
    out["inf"] = tree_inf
    return out


def _replay(walks, stop, keep_flags=False, horizon=None):
    tree = {}
    flags, last_visit = {}, {}
    for w in walks:
        if stop(tree, w.start):
            continue
        cut = next((t for t in range(1, len(w.vertices)) if stop(tree, w.vertices[t])), None)
        hit = cut is not None
        if cut is None:
            cut = len(w.edges)
        piece = Path(w.vertices[:cut + 1], w.edges[:cut])
        last = {}
        for t, v in enumerate(piece.vertices[:-1]):
            last[v] = t
        branch = loop_erase(piece)
        for v, e, h in zip(branch.vertices, branch.edges, branch.vertices[1:]):
            tree[v] = (e, h)
            flags[v] = EXACT if hit else TRUNCATED
            last_visit[v] = last[v]
    if not keep_flags:
        return {v: e for v, (e, _) in tree.items()}
    edges = {e: (v, h) for v, (e, h) in tree.items()}
    return PartialArboretum(edges, flags, last_visit, horizon)


def horizon_doubling(g: LazyDigraph, seeds, edge_sets, horizon: int, n_samples: int,
                     random_state=None, doublings: int = 2) -> dict:
    """Inclusion probabilities of ``edge_sets`` at horizons ``H, 2H, 4H, ...``.

    Returns ``{"horizons": [...], "probabilities": [[...] per horizon],
    "deltas": [...]}``; deltas compare consecutive horizons edge set by edge set.
    """
    seed = base_seed(random_state)
    horizons = [horizon * 2**i for i in range(doublings + 1)]
    probs = []
    for i, h in enumerate(horizons):
        b = wilson_infinity_batch(g, seeds, h, n_samples, random_state=seed + i)
        probs.append([float(b.inclusion(es).mean()) for es in edge_sets])
    deltas = [[abs(a - b) for a, b in zip(p, q)] for p, q in zip(probs, probs[1:])]
    return {"horizons": horizons, "probabilities": probs, "deltas": deltas}

