"""Directed multigraphs, finite and lazily generated.

All algorithms key on edge identity, never on ``(tail, head)`` pairs, so
parallel edges and self-loops are first class.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Hashable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DuplicateEdgeId,
    EmptyGraph,
    ExhaustionUnavailable,
    GraphError,
    OracleInconsistency,
)

VertexId = Hashable
EdgeId = Hashable

#: token of the contracted boundary vertex; user vertex ids are non-negative
BOUNDARY = -1


def sort_key(token):
    """Total order on int/str tokens (ints first)."""
    return (isinstance(token, str), token)


def _check_token(token, what):
    if isinstance(token, bool) or not isinstance(token, (int, str)):
        raise GraphError(f"{what} {token!r} must be a non-negative int or a str")
    if isinstance(token, int) and token < 0:
        raise GraphError(f"{what} {token!r} must be non-negative")


class CompiledGraph:
    """Dense integer view of a (finite part of a) digraph for compiled kernels.

    Vertices and edges are renumbered ``0..n-1`` / ``0..m-1``.  Out-edges of
    vertex ``i`` are ``out_edges[out_off[i]:out_off[i+1]]`` sorted by edge id.
    ``frontier[i]`` marks vertices whose out-edges were not materialized.
    """

    def __init__(self, vertex_ids, out_lists, frontier=None):
        self.vertex_ids = list(vertex_ids)
        self.index = {v: i for i, v in enumerate(self.vertex_ids)}
        n = len(self.vertex_ids)
        edge_ids, tails, heads, counts = [], [], [], np.zeros(n, dtype=np.int64)
        for i, v in enumerate(self.vertex_ids):
            for e, h in out_lists.get(v, ()):
                edge_ids.append(e)
                tails.append(i)
                heads.append(self.index[h])
                counts[i] += 1
        self.edge_ids = edge_ids
        self.edge_index = {e: j for j, e in enumerate(edge_ids)}
        self.tail = np.asarray(tails, dtype=np.int64)
        self.head = np.asarray(heads, dtype=np.int64)
        self.out_off = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.out_off[1:])
        # edges were appended grouped by tail, in out-list order
        self.out_edges = np.arange(len(edge_ids), dtype=np.int64)
        self.frontier = np.zeros(n, dtype=np.bool_) if frontier is None else frontier

    @property
    def n_vertices(self):
        return len(self.vertex_ids)

    @property
    def n_edges(self):
        return len(self.edge_ids)

    def out_degree(self, i):
        return int(self.out_off[i + 1] - self.out_off[i])


class Digraph:
    """Finite directed multigraph with a source and an optional sink.

    Immutable after construction.  ``edges`` maps edge id to ``(tail, head)``.
    """

    def __init__(self, edges, source, sink=None, vertices=()):
        self._edges = dict(edges)
        self.source = source
        self.sink = sink
        vs = set(vertices)
        vs.add(source)
        if sink is not None:
            vs.add(sink)
        for t, h in self._edges.values():
            vs.add(t)
            vs.add(h)
        self.vertices = frozenset(vs)
        out = {v: [] for v in vs}
        inn = {v: [] for v in vs}
        for e in sorted(self._edges, key=sort_key):
            t, h = self._edges[e]
            out[t].append(e)
            inn[h].append(e)
        self._out = {v: tuple(es) for v, es in out.items()}
        self._in = {v: tuple(es) for v, es in inn.items()}

    @property
    def edges(self):
        return self._edges

    def sorted_vertices(self):
        return sorted(self.vertices, key=sort_key)

    def sorted_edges(self):
        return sorted(self._edges, key=sort_key)

    def tail(self, e):
        return self._edges[e][0]

    def head(self, e):
        return self._edges[e][1]

    def out_edges(self, v):
        return self._out[v]

    def in_edges(self, v):
        return self._in[v]

    def out_degree(self, v):
        return len(self._out[v])

    def in_degree(self, v):
        return len(self._in[v])

    def __len__(self):
        return len(self._edges)

    def __repr__(self):
        return (f"Digraph(|V|={len(self.vertices)}, |E|={len(self._edges)}, "
                f"source={self.source!r}, sink={self.sink!r})")

    def with_endpoints(self, source, sink=None):
        return Digraph(self._edges, source, sink, self.vertices)

    def subgraph(self, edge_ids, source, sink=None):
        """Digraph on the given edges (vertices: their endpoints plus source/sink)."""
        return Digraph({e: self._edges[e] for e in edge_ids}, source, sink)

    def reachable_from(self, v, reverse=False):
        seen = {v}
        todo = [v]
        while todo:
            u = todo.pop()
            for e in (self._in[u] if reverse else self._out[u]):
                w = self._edges[e][0] if reverse else self._edges[e][1]
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    def is_connected(self):
        """Connectivity of the underlying undirected multigraph."""
        start = next(iter(self.vertices))
        seen = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for e in self._out[u] + self._in[u]:
                t, h = self._edges[e]
                for w in (t, h):
                    if w not in seen:
                        seen.add(w)
                        todo.append(w)
        return len(seen) == len(self.vertices)

    @cached_property
    def compiled(self) -> CompiledGraph:
        vs = self.sorted_vertices()
        out_lists = {v: [(e, self._edges[e][1]) for e in self._out[v]] for v in vs}
        return CompiledGraph(vs, out_lists)


def build_digraph(edge_list: Iterable[tuple], source, sink=None) -> Digraph:
    """Validated :class:`Digraph` from ``(edge_id, tail, head)`` triples.

    >>> g = build_digraph([(0, 0, 1), (1, 1, 2), (2, 2, 0)], source=0, sink=0)
    >>> sorted(g.vertices)
    [0, 1, 2]
    """
    edges = {}
    for e, t, h in edge_list:
        _check_token(e, "edge id")
        _check_token(t, "vertex")
        _check_token(h, "vertex")
        if e in edges:
            raise DuplicateEdgeId(f"edge id {e!r} used twice")
        edges[e] = (t, h)
    if source is None:
        raise EmptyGraph("graph has no vertices" if not edges else "graph has no source")
    _check_token(source, "source")
    if sink is not None:
        _check_token(sink, "sink")
    return Digraph(edges, source, sink)


# ---------------------------------------------------------------- lazy graphs


class LazyDigraph:
    """Countable locally finite digraph given by oracles.

    ``out_edges_oracle(v)`` returns ``[(edge_id, head), ...]``.  Answers are
    memoized on first use so repeated queries are deterministic.
    ``in_edges_oracle(v)`` returning ``[(edge_id, tail), ...]`` is needed only
    for boundary contraction; ``in_degree_oracle`` defaults to its length.
    """

    def __init__(self, out_edges_oracle: Callable, source, *,
                 in_degree_oracle: Callable | None = None,
                 in_edges_oracle: Callable | None = None,
                 exhaustion_oracle: Callable | None = None,
                 family: tuple | None = None):
        if in_degree_oracle is None and in_edges_oracle is not None:
            in_degree_oracle = lambda v: len(in_edges_oracle(v))  # noqa: E731
        self._raw_out = out_edges_oracle
        self._raw_in_degree = in_degree_oracle
        self._raw_in_edges = in_edges_oracle
        self._raw_exhaustion = exhaustion_oracle
        self.source = source
        self.family = family
        self._out_memo: dict = {}
        self._in_memo: dict = {}
        self._indeg_memo: dict = {}
        self._lock = threading.Lock()
        self._balls: dict = {}

    def __repr__(self):
        if self.family:
            return f"LazyDigraph(family={self.family!r})"
        return f"LazyDigraph(source={self.source!r})"

    def out_edges(self, v) -> tuple:
        with self._lock:
            if v not in self._out_memo:
                self._out_memo[v] = tuple((e, h) for e, h in self._raw_out(v))
            return self._out_memo[v]

    def out_degree(self, v):
        return len(self.out_edges(v))

    def in_degree(self, v) -> int:
        if self._raw_in_degree is None:
            raise GraphError("this lazy graph has no in-degree oracle")
        with self._lock:
            if v not in self._indeg_memo:
                self._indeg_memo[v] = int(self._raw_in_degree(v))
            return self._indeg_memo[v]

    def in_edges(self, v) -> tuple:
        if self._raw_in_edges is None:
            raise GraphError("this lazy graph has no in-edge oracle")
        with self._lock:
            if v not in self._in_memo:
                self._in_memo[v] = tuple((e, t) for e, t in self._raw_in_edges(v))
            return self._in_memo[v]

    def exhaustion(self, n: int) -> frozenset:
        if self._raw_exhaustion is None:
            raise ExhaustionUnavailable("this lazy graph has no exhaustion oracle")
        try:
            vs = frozenset(self._raw_exhaustion(n))
        except (ValueError, IndexError, KeyError) as exc:
            raise ExhaustionUnavailable(f"exhaustion set {n} unavailable: {exc}") from exc
        if not vs:
            raise ExhaustionUnavailable(f"exhaustion set V_{n} is empty")
        return vs

    def head(self, v, e):
        for f, h in self.out_edges(v):
            if f == e:
                return h
        raise KeyError(e)

    def compile_ball(self, roots: Sequence, radius: int,
                     max_vertices: int = 2_000_000) -> CompiledGraph:
        """Materialize every vertex within ``radius`` directed hops of ``roots``.

        Vertices at distance exactly ``radius`` are frontier vertices: a walk
        of at most ``radius`` steps from a root never leaves them.
        """
        key = (tuple(roots), int(radius))
        with self._lock:
            if key in self._balls:
                return self._balls[key]
        dist = {}
        order = []
        todo = deque()
        for r in roots:
            if r not in dist:
                dist[r] = 0
                order.append(r)
                todo.append(r)
        out_lists = {}
        while todo:
            v = todo.popleft()
            if dist[v] >= radius:
                continue
            out_lists[v] = self.out_edges(v)
            for _, h in out_lists[v]:
                if h not in dist:
                    dist[h] = dist[v] + 1
                    order.append(h)
                    todo.append(h)
                    if len(order) > max_vertices:
                        raise GraphError(
                            f"ball of radius {radius} exceeds {max_vertices} vertices")
        frontier = np.array([v not in out_lists for v in order], dtype=np.bool_)
        cg = CompiledGraph(order, out_lists, frontier)
        with self._lock:
            self._balls[key] = cg
        return cg


def ladder_family(p: int, q: int, exhaustion_step: int = 1) -> LazyDigraph:
    """Half-line with ``p`` parallel edges ``n -> n+1`` and ``q`` edges ``n+1 -> n``.

    Source 0, exhaustion ``V_n = {0, ..., exhaustion_step*n - 1}``.  Sourced
    Eulerian exactly when ``p == q + 1``.  Edge ids: the forward edges of
    level ``n`` are ``n*(p+q) + j`` (``j < p``), the backward ones
    ``n*(p+q) + p + j`` (``j < q``).
    """
    if p < 1 or q < 0:
        raise GraphError("ladder needs p >= 1 and q >= 0")
    w = p + q

    def out_edges(v):
        es = [(v * w + j, v + 1) for j in range(p)]
        if v >= 1:
            es += [((v - 1) * w + p + j, v - 1) for j in range(q)]
        return es

    def in_edges(v):
        es = [(v * w + p + j, v + 1) for j in range(q)]
        if v >= 1:
            es += [((v - 1) * w + j, v - 1) for j in range(p)]
        return es

    def exhaustion(n):
        if n < 1:
            raise ValueError("exhaustion index starts at 1")
        return range(exhaustion_step * n)

    return LazyDigraph(out_edges, 0, in_edges_oracle=in_edges,
                       exhaustion_oracle=exhaustion, family=("ladder", p, q))


# ------------------------------------------------------- boundary contraction


@dataclass(frozen=True)
class ContractedDigraph:
    """``G_n^*``: ``V \\ V_n`` collapsed to :data:`BOUNDARY`."""

    graph: Digraph
    boundary_vertex: int
    edge_map: dict
    inner: frozenset = field(default_factory=frozenset)


def contract_boundary(g: LazyDigraph, n: int) -> ContractedDigraph:
    """Boundary contraction of ``g`` at exhaustion index ``n``.

    Edges are the edges of ``g`` with at least one endpoint in ``V_n``; the
    other endpoint, if outside, becomes the boundary vertex.  Edge ids are
    kept, so ``edge_map`` is the identity on them.
    """
    inner = g.exhaustion(n)
    edges = {}
    for v in inner:
        for e, h in g.out_edges(v):
            edges[e] = (v, h if h in inner else BOUNDARY)
        for e, t in g.in_edges(v):
            if t not in inner:
                if e in edges and edges[e] != (BOUNDARY, v):
                    raise OracleInconsistency(f"edge {e!r} has conflicting endpoints")
                edges[e] = (BOUNDARY, v)
    source = g.source if g.source in inner else BOUNDARY
    graph = Digraph(edges, source, BOUNDARY)
    return ContractedDigraph(graph, BOUNDARY, {e: e for e in edges}, inner)


# -------------------------------------------------------------- classification


class EulerianKind(str, Enum):
    FINITE_SOURCE_SINK = "FiniteSourceSink"
    FINITE_CIRCUIT_ROOT = "FiniteCircuitRoot"
    INFINITE_SOURCED = "InfiniteSourced"
    NOT_EULERIAN = "NotEulerian"


class Witness(NamedTuple):
    vertex: object
    in_degree: int
    out_degree: int


@dataclass(frozen=True)
class EulerianClassification:
    kind: EulerianKind
    witness: Witness | None = None
    reason: str = ""

    @property
    def is_eulerian(self):
        return self.kind is not EulerianKind.NOT_EULERIAN

    def to_json(self):
        d = {"kind": self.kind.value, "reason": self.reason}
        if self.witness is not None:
            d["witness"] = {"vertex": self.witness.vertex,
                            "in_degree": self.witness.in_degree,
                            "out_degree": self.witness.out_degree}
        return d


def infer_sink(g: Digraph):
    """The sink an Eulerian path from ``g.source`` would need, or ``None``."""
    if g.sink is not None:
        return g.sink
    o = g.source
    if g.out_degree(o) == g.in_degree(o):
        return o
    cands = [v for v in g.sorted_vertices() if g.in_degree(v) == g.out_degree(v) + 1]
    return cands[0] if len(cands) == 1 else None


def _fail(g, v, reason):
    return EulerianClassification(
        EulerianKind.NOT_EULERIAN, Witness(v, g.in_degree(v), g.out_degree(v)), reason)


def classify_eulerian(g) -> EulerianClassification:
    """Classify ``(g, source, sink)``; a missing sink is inferred from degrees."""
    if isinstance(g, LazyDigraph):
        cert = classify_sourced_eulerian_prefix(g, depth=16)
        if cert.passed:
            return EulerianClassification(EulerianKind.INFINITE_SOURCED,
                                          reason=f"bounded certificate, depth {cert.depth}")
        return EulerianClassification(EulerianKind.NOT_EULERIAN, cert.witness, cert.reason)
    o = g.source
    z = infer_sink(g)
    if z is None:
        return _fail(g, o, "no vertex can serve as the sink")
    for v in [o, z] + g.sorted_vertices():
        i, u = g.in_degree(v), g.out_degree(v)
        if o != z and v == o:
            if u != i + 1:
                return _fail(g, v, "source must have out-degree = in-degree + 1")
        elif o != z and v == z:
            if i != u + 1:
                return _fail(g, v, "sink must have in-degree = out-degree + 1")
        elif i != u:
            return _fail(g, v, "vertex is not balanced")
    fwd = g.reachable_from(o)
    back = g.reachable_from(z, reverse=True)
    for v in g.sorted_vertices():
        if v not in fwd:
            return _fail(g, v, "vertex not reachable from the source")
        if v not in back:
            return _fail(g, v, "sink not reachable from vertex")
    kind = EulerianKind.FINITE_CIRCUIT_ROOT if o == z else EulerianKind.FINITE_SOURCE_SINK
    return EulerianClassification(kind)


@dataclass(frozen=True)
class PrefixCertificate:
    """Bounded certificate: only vertices within ``depth`` hops were checked."""

    passed: bool
    depth: int
    explored: int
    witness: Witness | None = None
    reason: str = ""


def classify_sourced_eulerian_prefix(g: LazyDigraph, depth: int) -> PrefixCertificate:
    """Check the sourced-Eulerian degree conditions on the ``depth``-ball of the source."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    observed_in: dict = {}
    dist = {g.source: 0}
    order = [g.source]
    todo = deque([g.source])
    while todo:
        v = todo.popleft()
        out = g.out_edges(v)
        if tuple((e, h) for e, h in g._raw_out(v)) != out:
            raise OracleInconsistency(f"out-edge oracle changed its answer at {v!r}")
        if dist[v] >= depth:
            continue
        for e, h in out:
            observed_in.setdefault(h, set()).add(e)
            if h not in dist:
                dist[h] = dist[v] + 1
                order.append(h)
                todo.append(h)
    for v in order:
        i, u = g.in_degree(v), g.out_degree(v)
        if len(observed_in.get(v, ())) > i:
            raise OracleInconsistency(
                f"{v!r} has more observed incoming edges than its in-degree {i}")
        if g._raw_in_degree is not None and int(g._raw_in_degree(v)) != i:
            raise OracleInconsistency(f"in-degree oracle changed its answer at {v!r}")
        want = i + 1 if v == g.source else i
        if u != want:
            reason = ("source must have out-degree = in-degree + 1" if v == g.source
                      else "vertex is not balanced")
            return PrefixCertificate(False, depth, len(order), Witness(v, i, u), reason)
    return PrefixCertificate(True, depth, len(order))


@dataclass(frozen=True)
class CommunicatingClasses:
    classes: tuple
    irreducible: bool


def communicating_classes(g: Digraph) -> CommunicatingClasses:
    """Strongly connected components, ordered by their smallest vertex."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    cg = g.compiled
    n = cg.n_vertices
    mat = csr_matrix((np.ones(cg.n_edges), (cg.tail, cg.head)), shape=(n, n))
    k, labels = connected_components(mat, directed=True, connection="strong")
    groups: dict = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(cg.vertex_ids[i])
    classes = sorted((frozenset(vs) for vs in groups.values()),
                     key=lambda c: min(sort_key(v) for v in c))
    return CommunicatingClasses(tuple(classes), k == 1)
