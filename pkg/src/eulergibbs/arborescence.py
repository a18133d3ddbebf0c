"""In-arborescences and in-arboreta: validation, pasts, enumeration, counting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .digraph import Digraph, sort_key
from .errors import CapExceeded


@dataclass(frozen=True)
class InArboretum:
    """Edge set with at most one out-edge per vertex.

    ``edges`` maps edge id to ``(tail, head)``.  ``root`` is the root vertex,
    or ``None`` for an arboretum rooted at infinity.
    """

    edges: dict
    vertices: frozenset
    root: object = None
    _children: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        kids: dict = {}
        for e, (t, h) in self.edges.items():
            kids.setdefault(h, []).append(t)
        object.__setattr__(self, "_children", kids)

    def edge_set(self):
        return frozenset(self.edges)

    def out_edge(self, v):
        for e, (t, _) in self.edges.items():
            if t == v:
                return e
        return None

    def children(self, v):
        return self._children.get(v, ())

    def to_json(self):
        return sorted(self.edges, key=sort_key)


@dataclass(frozen=True)
class OracleArboretum:
    """Possibly infinite arboretum given by ``children(v)``: tails pointing at ``v``."""

    children_oracle: Callable

    def children(self, v):
        return self.children_oracle(v)


@dataclass(frozen=True)
class Validation:
    ok: bool
    vertex: object = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate_in_arborescence(g: Digraph, edges: Iterable, root) -> Validation:
    """Is ``edges`` a spanning in-arborescence of ``g`` rooted at ``root``?"""
    chosen: dict = {}
    for e in sorted(set(edges), key=sort_key):
        if e not in g.edges:
            return Validation(False, None, f"edge {e!r} not in graph")
        t, _ = g.edges[e]
        if t in chosen:
            return Validation(False, t, "out-degree 2 or more")
        chosen[t] = e
    if root in chosen:
        return Validation(False, root, "root has an out-edge")
    for v in g.sorted_vertices():
        if v != root and v not in chosen:
            return Validation(False, v, "out-degree 0 away from the root")
    for v in g.sorted_vertices():
        seen = set()
        u = v
        while u != root:
            if u in seen:
                return Validation(False, v, "does not reach the root")
            seen.add(u)
            u = g.head(chosen[u])
    return Validation(True)


class BoundExceeded:
    """Marker returned when a past has more than ``bound`` vertices."""

    def __init__(self, bound):
        self.bound = bound

    def __repr__(self):
        return f"BoundExceeded({self.bound})"

    def __eq__(self, other):
        return isinstance(other, BoundExceeded) and other.bound == self.bound


def past(a, u, bound: int = 10**6):
    """Vertices with a directed arboretum path to ``u``, ``u`` included."""
    seen = {u}
    todo = [u]
    while todo:
        v = todo.pop()
        for x in a.children(v):
            if x not in seen:
                seen.add(x)
                if len(seen) > bound:
                    return BoundExceeded(bound)
                todo.append(x)
    return seen


@dataclass(frozen=True)
class OneEndedReport:
    #: vertex -> past size, or None if the bound was exceeded
    verdicts: dict
    one_ended: bool


def check_one_ended(a, vertices: Iterable, bound: int) -> OneEndedReport:
    verdicts = {}
    for v in vertices:
        p = past(a, v, bound)
        verdicts[v] = None if isinstance(p, BoundExceeded) else len(p)
    return OneEndedReport(verdicts, all(k is not None for k in verdicts.values()))


def enumerate_in_arborescences(g: Digraph, z, cap: int = 10**6) -> list:
    """All spanning in-arborescences rooted at ``z``, as frozensets of edge ids.

    Backtracks over per-vertex out-edge choices in edge-id order, rejecting a
    choice as soon as it closes a cycle.
    """
    if z not in g.vertices:
        raise KeyError(z)
    reach = g.reachable_from(z, reverse=True)
    if len(reach) != len(g.vertices):
        return []
    others = [v for v in g.sorted_vertices() if v != z]
    choices = [[e for e in g.out_edges(v) if g.head(e) != v] for v in others]
    nxt: dict = {}
    out = []

    def closes_cycle(v):
        u = nxt[v]
        while u in nxt:
            if u == v:
                return True
            u = nxt[u]
        return False

    def rec(i, chosen):
        if i == len(others):
            if len(out) >= cap:
                raise CapExceeded(f"more than {cap} arborescences")
            out.append(frozenset(chosen))
            return
        v = others[i]
        for e in choices[i]:
            nxt[v] = g.head(e)
            if not closes_cycle(v):
                chosen.append(e)
                rec(i + 1, chosen)
                chosen.pop()
            del nxt[v]

    rec(0, [])
    return out


def bareiss_determinant(mat: list) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def out_laplacian(g: Digraph):
    """``D_out - A`` indexed by ``g.sorted_vertices()``."""
    vs = g.sorted_vertices()
    idx = {v: i for i, v in enumerate(vs)}
    n = len(vs)
    lap = [[0] * n for _ in range(n)]
    for t, h in g.edges.values():
        lap[idx[t]][idx[t]] += 1
        lap[idx[t]][idx[h]] -= 1
    return vs, lap


def count_in_arborescences(g: Digraph, z) -> int:
    """``|A_z^in(g)|`` by the directed matrix-tree theorem (exact integers)."""
    vs, lap = out_laplacian(g)
    k = vs.index(z)
    minor = [row[:k] + row[k + 1:] for i, row in enumerate(lap) if i != k]
    return bareiss_determinant(minor)
