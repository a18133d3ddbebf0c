"""Eulerian paths: BEST counting, enumeration, uniform and Gibbs sampling."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import _kernels
from .arborescence import count_in_arborescences, validate_in_arborescence
from .digraph import (
    Digraph,
    LazyDigraph,
    classify_eulerian,
    classify_sourced_eulerian_prefix,
    infer_sink,
    sort_key,
)
from .errors import CapExceeded, NotEulerianInput, StackExhausted
from .rng import as_generator, base_seed, kernel_seed
from .walks import Path, StackConfiguration, follow_stacks
from .wilson import TRUNCATED, _InfiniteWilson, _full_order, wilson_finite


def _require_eulerian(g: Digraph):
    cls = classify_eulerian(g)
    if not cls.is_eulerian:
        raise NotEulerianInput(f"graph is not Eulerian: {cls.reason}", cls.witness)
    return g.source, infer_sink(g)


def count_eulerian_paths(g: Digraph) -> int:
    """Eulerian paths from source to sink, by the BEST formula.

    ``|A_z| * outdeg(z)! * prod_{v != z} (outdeg(v) - 1)!``
    """
    _, z = _require_eulerian(g)
    total = count_in_arborescences(g, z) * factorial(g.out_degree(z))
    for v in g.vertices:
        if v != z:
            total *= factorial(g.out_degree(v) - 1)
    return total


def enumerate_eulerian_paths(g: Digraph, cap: int = 10**6) -> list:
    """Every Eulerian source -> sink path, by backtracking over unused out-edges."""
    o, z = _require_eulerian(g)
    m = len(g)
    used = set()
    es = []
    out = []

    def rec(v):
        if len(es) == m:
            if v == z:
                if len(out) >= cap:
                    raise CapExceeded(f"more than {cap} Eulerian paths")
                out.append(Path.from_edges(g, o, es))
            return
        for e in g.out_edges(v):
            if e not in used:
                used.add(e)
                es.append(e)
                rec(g.head(e))
                es.pop()
                used.discard(e)

    rec(o)
    return out


def is_eulerian_stack(g: Digraph, o, z, s) -> bool:
    """BEST characterization of stack configurations encoding Eulerian paths.

    True iff every stack lists its vertex's out-edges exactly once and the
    bottoms of the stacks away from ``z`` form a spanning in-arborescence
    rooted at ``z``.
    """
    stacks = {v: tuple(st) for v, st in s.items()}
    for v in stacks:
        if v not in g.vertices:
            return False
    bottoms = []
    for v in g.vertices:
        st = stacks.get(v, ())
        if sorted(st, key=sort_key) != sorted(g.out_edges(v), key=sort_key):
            return False
        if v != z and st:
            bottoms.append(st[-1])
    return validate_in_arborescence(g, bottoms, z).ok


def _stack_with_bottom(out_edges, bottom, rng):
    rest = [e for e in out_edges if e != bottom]
    rest = [rest[i] for i in rng.permutation(len(rest))]
    return rest + ([] if bottom is None else [bottom])


def sample_eulerian_finite(g: Digraph, rng=None) -> Path:
    """Uniform Eulerian path: Wilson bottoms, uniform orders above, follow the stacks."""
    o, z = _require_eulerian(g)
    rng = as_generator(rng)
    arb = wilson_finite(g, z, rng=rng)
    bottom = {t: e for e, (t, _) in arb.edges.items()}
    stacks = StackConfiguration(
        {v: _stack_with_bottom(g.out_edges(v), bottom.get(v), rng) for v in g.sorted_vertices()})
    return follow_stacks(o, stacks, g)


def sample_eulerian_batch(g: Digraph, n_samples: int, random_state=None,
                          n_threads=None) -> np.ndarray:
    """``n_samples`` uniform Eulerian paths as rows of compiled edge indices."""
    o, z = _require_eulerian(g)
    cg = g.compiled
    order = np.array([cg.index[v] for v in _full_order(g, z, None)], dtype=np.int64)
    seed = base_seed(random_state)
    return _kernels.run_chunked(
        lambda c, n: _kernels.euler_finite(kernel_seed(seed, c), n, cg.out_off, cg.out_edges,
                                           cg.head, cg.index[o], cg.index[z], order, len(g)),
        n_samples, n_threads)


def decode_path(g, start, row, cg=None) -> Path:
    cg = g.compiled if cg is None else cg
    es = [cg.edge_ids[j] for j in row if j >= 0]
    vs = [start] + [cg.vertex_ids[cg.head[j]] for j in row if j >= 0]
    return Path(vs, es)


def encode_path(g: Digraph, p: Path) -> tuple:
    cg = g.compiled
    return tuple(cg.edge_index[e] for e in p.edges)


def prefix_law(paths, k: int) -> dict:
    """Law of the first ``k`` edges under the uniform measure on ``paths``."""
    counts = Counter(p.edges[:k] for p in paths)
    total = sum(counts.values())
    return {pre: Fraction(c, total) for pre, c in counts.items()}


# ---------------------------------------------------------------- Gibbs prefix


@dataclass(frozen=True)
class GibbsPrefixSample:
    """First steps of the path built from WUA-bottomed stacks.

    ``truncated_stack_vertices`` lists the materialized stacks whose bottom
    came from a horizon-truncated walk; ``tainted`` is set when one of those
    walks was cut within ``settle`` steps of its last visit to that vertex, or
    a bottom could not be assigned at all.
    """

    path: Path
    horizon_used: int
    truncated_stack_vertices: tuple
    covered_edge_count: int
    tainted: bool = False

    def to_json(self):
        return {"path": self.path.to_json(), "truncated": self.tainted,
                "horizon": self.horizon_used,
                "truncated_stack_vertices": list(self.truncated_stack_vertices)}


def require_sourced_eulerian(g: LazyDigraph, k: int):
    """Raise :class:`NotEulerianInput` unless ``g`` passes the bounded prefix check."""
    cert = classify_sourced_eulerian_prefix(g, depth=max(1, k))
    if not cert.passed:
        raise NotEulerianInput(f"not sourced Eulerian near the source: {cert.reason}",
                               cert.witness)


def sample_gibbs_prefix(g: LazyDigraph, k: int, horizon: int, rng=None,
                        settle: int | None = None) -> GibbsPrefixSample:
    """``k`` steps of the stack path whose bottoms are the wired uniform in-arboretum.

    Stacks are built on first arrival at a vertex: its arboretum edge (from
    Wilson rooted at infinity, seeded adaptively) at the bottom, the other
    out-edges in uniform order above it.  Raises :class:`StackExhausted` if
    the path stops before ``k`` steps.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    require_sourced_eulerian(g, k)
    settle = horizon // 2 if settle is None else settle
    rng = as_generator(rng)
    w = _InfiniteWilson(g, horizon, rng)
    stacks = {}
    truncated, tainted = [], False
    v = g.source
    vs, es = [v], []
    for _ in range(k):
        if v not in stacks:
            w.attach(v)
            out = [e for e, _ in g.out_edges(v)]
            bottom = w.out[v][0] if v in w.out else None
            stacks[v] = deque(_stack_with_bottom(out, bottom, rng))
            if bottom is None:
                truncated.append(v)
                tainted = True
            elif w.flags[v] == TRUNCATED:
                truncated.append(v)
                if horizon - w.last_visit[v] < settle:
                    tainted = True
        if not stacks[v]:
            sample = GibbsPrefixSample(Path(vs, es), horizon, tuple(truncated), len(es), tainted)
            raise StackExhausted(f"path stopped at {v!r} after {len(es)} steps",
                                 sample, tainted)
        e = stacks[v].popleft()
        v = g.head(v, e)
        es.append(e)
        vs.append(v)
    return GibbsPrefixSample(Path(vs, es), horizon, tuple(truncated), len(es), tainted)


@dataclass(frozen=True)
class GibbsBatch:
    edges: np.ndarray           # compiled edge indices, -1 padded
    steps: np.ndarray
    truncated_stacks: np.ndarray
    tainted: np.ndarray
    horizon: int
    graph: object               # CompiledGraph
    source: object

    def __len__(self):
        return self.edges.shape[0]

    def path(self, i) -> Path:
        return decode_path(None, self.source, self.edges[i], cg=self.graph)

    def edge_id_rows(self):
        ids = np.array(self.graph.edge_ids + [None], dtype=object)
        return ids[self.edges]

    @property
    def exhausted(self):
        return self.steps < self.edges.shape[1]


def sample_gibbs_prefix_batch(g: LazyDigraph, k: int, horizon: int, n_samples: int,
                              random_state=None, settle: int | None = None,
                              n_threads=None) -> GibbsBatch:
    """Compiled batch version of :func:`sample_gibbs_prefix` (no exception on exhaustion)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    require_sourced_eulerian(g, k)
    settle = horizon // 2 if settle is None else settle
    cg = g.compile_ball([g.source], k + horizon)
    src = cg.index[g.source]
    seed = base_seed(random_state)
    rows, steps, ntrunc, taint = _kernels.run_chunked(
        lambda c, n: _kernels.gibbs_prefix(kernel_seed(seed, c), n, cg.out_off, cg.out_edges,
                                           cg.head, src, k, horizon, settle),
        n_samples, n_threads)
    return GibbsBatch(rows, steps, ntrunc, taint, horizon, cg, g.source)

