"""Paths, random walks, loop-erasure and stack encodings of paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels
from .digraph import LazyDigraph, sort_key
from .errors import GraphError
from .rng import as_generator, base_seed, kernel_seed

DEFAULT_STEP_CAP = 10**6


@dataclass(frozen=True)
class Path:
    """Alternating vertex/edge sequence ``v0, e01, v1, ..., vm``.

    ``truncated`` and ``dead_end`` flag paths cut short by a step cap or by a
    vertex without out-edges; they do not take part in equality.
    """

    vertices: tuple
    edges: tuple = ()
    truncated: bool = field(default=False, compare=False)
    dead_end: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.vertices) != len(self.edges) + 1:
            raise GraphError("a path has exactly one more vertex than edges")

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def __len__(self):
        return len(self.edges)

    def check(self, g):
        """Raise unless every edge goes from its predecessor to its successor."""
        for i, e in enumerate(self.edges):
            if isinstance(g, LazyDigraph):
                ok = (e, self.vertices[i + 1]) in g.out_edges(self.vertices[i])
            else:
                ok = e in g.edges and g.edges[e] == (self.vertices[i], self.vertices[i + 1])
            if not ok:
                raise GraphError(f"edge {e!r} at step {i} does not join "
                                 f"{self.vertices[i]!r} -> {self.vertices[i + 1]!r}")
        return self

    def prefix(self, k):
        return Path(self.vertices[:k + 1], self.edges[:k])

    def to_json(self):
        out = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            out += [e, v]
        return out

    @classmethod
    def from_json(cls, items):
        items = list(items)
        if len(items) % 2 != 1:
            raise GraphError("path JSON must alternate vertex, edge, ..., vertex")
        return cls(items[0::2], items[1::2])

    @classmethod
    def from_edges(cls, g, start, edges):
        vs = [start]
        for e in edges:
            vs.append(g.head(e))
        return cls(vs, edges)


class StackConfiguration(dict):
    """Vertex -> list of out-edges, index 0 being the top of the stack.

    Missing vertices have empty stacks.  A value may be any iterable,
    including an infinite generator (consumed lazily by :func:`follow_stacks`).
    """

    def stack(self, v):
        return self.get(v, ())

    def normalized(self):
        return {v: tuple(s) for v, s in self.items() if len(tuple(s))}

    def __eq__(self, other):
        if not isinstance(other, Mapping):
            return NotImplemented
        return self.normalized() == StackConfiguration(other).normalized()

    __hash__ = None

    def to_json(self):
        return {str(v): list(s) for v, s in
                sorted(self.normalized().items(), key=lambda kv: sort_key(kv[0]))}


# ------------------------------------------------------------- stopping rules


@dataclass(frozen=True)
class HitSet:
    """Stop on reaching any vertex of ``vertices`` (immediately if started there)."""
    vertices: object


@dataclass(frozen=True)
class FixedLength:
    steps: int


@dataclass(frozen=True)
class LeaveSet:
    """Stop on the first step that lands outside ``vertices``."""
    vertices: object


def _out(g, v):
    if isinstance(g, LazyDigraph):
        return g.out_edges(v)
    return [(e, g.head(e)) for e in g.out_edges(v)]


def random_walk(g, start, stop, rng=None, max_steps=None) -> Path:
    """Simple random walk: each step crosses a uniform out-edge.

    ``stop`` is a :class:`HitSet`, :class:`FixedLength` or :class:`LeaveSet`.
    ``max_steps`` caps any rule (``truncated`` flag).  Reaching a vertex with no
    out-edges ends the walk with the ``dead_end`` flag.
    """
    rng = as_generator(rng)
    vs, es = [start], []
    v = start

    def done(v):
        if isinstance(stop, HitSet):
            return v in stop.vertices
        if isinstance(stop, LeaveSet):
            return len(es) > 0 and v not in stop.vertices
        return isinstance(stop, FixedLength) and len(es) >= stop.steps

    truncated = False
    while not done(v):
        if max_steps is not None and len(es) >= max_steps:
            truncated = True
            break
        out = _out(g, v)
        if not out:
            return Path(vs, es, dead_end=True)
        e, v = out[int(rng.integers(len(out)))]
        es.append(e)
        vs.append(v)
    return Path(vs, es, truncated=truncated)


def loop_erase(p: Path) -> Path:
    """Chronological loop-erasure.

    ``t_0 = 0`` and ``t_i = 1 + max{t >= t_{i-1} : p_t = p_{t_{i-1}}}``; the
    output keeps ``p_{t_i}`` and the edge leaving it at its last visit.
    """
    last = {}
    for t, v in enumerate(p.vertices):
        last[v] = t
    m = len(p.edges)
    vs, es = [], []
    t = 0
    while True:
        vs.append(p.vertices[t])
        s = last[p.vertices[t]]
        if s == m:
            break
        es.append(p.edges[s])
        t = s + 1
    return Path(vs, es, truncated=p.truncated)


def stacks_of_path(p: Path) -> StackConfiguration:
    """Exits from each vertex in crossing order (a re-crossed edge repeats)."""
    s = StackConfiguration()
    for v, e in zip(p.vertices, p.edges):
        s.setdefault(v, []).append(e)
    return StackConfiguration({v: tuple(es) for v, es in s.items()})


def follow_stacks(v0, s: Mapping, g, step_cap: int = DEFAULT_STEP_CAP) -> Path:
    """The maximal path from ``v0`` at the top of ``s`` on host graph ``g``.

    Pops the top of the current vertex's stack and crosses it until the
    current stack is empty.  Stops with the ``truncated`` flag after
    ``step_cap`` steps.
    """
    head = _head_lookup(g)
    iters = {}
    vs, es = [v0], []
    v = v0
    while True:
        if len(es) >= step_cap:
            return Path(vs, es, truncated=True)
        it = iters.get(v)
        if it is None:
            it = iters[v] = iter(s.get(v, ()))
        e = next(it, _EMPTY)
        if e is _EMPTY:
            return Path(vs, es)
        v = head(v, e)
        es.append(e)
        vs.append(v)


_EMPTY = object()


def _head_lookup(g):
    if isinstance(g, LazyDigraph):
        return g.head
    return lambda v, e: g.head(e)


@dataclass(frozen=True)
class ReturnEstimate:
    point_estimate: float
    half_width_99: float
    samples: int
    horizon: int

    def to_json(self):
        return {"point_estimate": self.point_estimate, "half_width_99": self.half_width_99,
                "samples": self.samples, "horizon": self.horizon}


#: 0.995 standard normal quantile
Z99 = 2.5758293035489004
#: below this many samples the half-width is reported as 1 (uninformative)
MIN_EFFECTIVE_SAMPLES = 30


def normal_half_width(p_hat, n, z=Z99):
    if n < MIN_EFFECTIVE_SAMPLES:
        return 1.0
    return z * math.sqrt(p_hat * (1.0 - p_hat) / n)


def estimate_return_probability(g, o, samples: int, horizon: int, rng=None,
                                n_threads=None) -> ReturnEstimate:
    """Monte Carlo frequency of returning to ``o`` within ``horizon`` steps."""
    if samples < 1 or horizon < 1:
        raise ValueError("samples and horizon must be >= 1")
    if isinstance(g, LazyDigraph):
        cg = g.compile_ball([o], horizon)
    else:
        cg = g.compiled
    seed = base_seed(rng)
    hits = _kernels.run_chunked(
        lambda c, n: _kernels.return_count(kernel_seed(seed, c), n, cg.out_off, cg.out_edges,
                                           cg.head, cg.index[o], horizon),
        samples, n_threads)
    k = int(np.count_nonzero(hits))
    p_hat = k / samples
    return ReturnEstimate(p_hat, normal_half_width(p_hat, samples), samples, horizon)


def last_exit_arboretum(p: Path):
    """Edges by which ``p`` leaves each vertex for the last time.

    The final vertex contributes no edge, so for a finite path the result is
    an in-arborescence rooted at ``p.end`` over the visited vertices.
    """
    from .arborescence import InArboretum

    last = {}
    for v, e, h in zip(p.vertices, p.edges, p.vertices[1:]):
        last[v] = (e, h)
    last.pop(p.end, None)
    edges = {e: (v, h) for v, (e, h) in last.items()}
    return InArboretum(edges, frozenset(p.vertices), root=p.end)
