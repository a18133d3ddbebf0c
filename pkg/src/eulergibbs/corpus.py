"""Small Eulerian digraphs used as oracles by the verification suites.

:func:`all_eulerian_digraphs` lists every connected Eulerian multigraph with
at most ``m`` edges, up to relabelling the vertices other than the source
and sink.  Each such graph has an Eulerian path, and relabelling the path's
vertices in order of first appearance turns its vertex sequence into a
restricted growth string; so running over all those strings and keeping
one graph per isomorphism class is exhaustive.
"""

from __future__ import annotations

from collections import Counter
from itertools import permutations

import numpy as np

from .digraph import Digraph, build_digraph
from .rng import make_rng


def _growth_strings(length):
    """Sequences starting at 0 whose every new symbol is ``max + 1``."""
    def rec(seq, top):
        if len(seq) == length:
            yield tuple(seq)
            return
        for v in range(top + 2):
            seq.append(v)
            yield from rec(seq, max(top, v))
            seq.pop()

    yield from rec([0], 0)


def _from_pairs(pairs, source, sink) -> Digraph:
    pairs = sorted(pairs)
    return build_digraph([(i, t, h) for i, (t, h) in enumerate(pairs)], source, sink)


def _canonical(pairs, source, sink):
    """Smallest sorted edge multiset over relabellings fixing source and sink."""
    vs = sorted({v for uv in pairs for v in uv} | {source, sink})
    fixed = [source] if source == sink else [source, sink]
    free = [v for v in vs if v not in fixed]
    best = None
    for perm in permutations(range(len(fixed), len(vs))):
        lab = dict(zip(fixed, range(len(fixed))))
        lab.update(zip(free, perm))
        key = tuple(sorted((lab[t], lab[h]) for t, h in pairs))
        if best is None or key < best:
            best = key
    return best, 0, (0 if source == sink else 1)


def all_eulerian_digraphs(max_edges: int = 6) -> list:
    """Every connected Eulerian multigraph with ``1..max_edges`` edges, up to isomorphism.

    Source is vertex 0; the sink is 0 for circuits and 1 otherwise.
    """
    seen = set()
    out = []
    for m in range(1, max_edges + 1):
        for seq in _growth_strings(m + 1):
            pairs = list(zip(seq, seq[1:]))
            key = _canonical(pairs, seq[0], seq[-1])
            if key in seen:
                continue
            seen.add(key)
            out.append(_from_pairs(*key))
    return out


def graph_from_walk(seq) -> Digraph:
    """Multigraph of the transitions of ``seq``, source ``seq[0]``, sink ``seq[-1]``."""
    return _from_pairs(list(zip(seq, seq[1:])), seq[0], seq[-1])


def random_eulerian_digraphs(count: int, max_edges: int = 10, seed: int = 0,
                             min_edges: int = 2, states=(3, 6)) -> list:
    """``count`` random Eulerian digraphs: transition multigraphs of random walks.

    Each walk runs for ``min_edges..max_edges`` steps on the complete digraph
    with loops over ``states[0]..states[1]`` states.
    """
    rng = make_rng(seed, 7)
    out = []
    for _ in range(count):
        k = int(rng.integers(states[0], states[1] + 1))
        m = int(rng.integers(min_edges, max_edges + 1))
        seq = [0]
        for _ in range(m):
            seq.append(int(rng.integers(k)))
        out.append(graph_from_walk(seq))
    return out


def _bidirected(pairs):
    return [p for uv in pairs for p in (uv, uv[::-1])]


def named_graphs() -> dict:
    """Hand-made test graphs keyed by name."""
    g = {}
    g["C3"] = build_digraph([("a", 0, 1), ("b", 1, 2), ("c", 2, 0)], 0, 0)
    g["D"] = build_digraph([("e1", 0, 1), ("e2", 0, 1), ("f", 1, 0)], 0, 1)
    g["two-loop"] = build_digraph([("ou", 0, 1), ("uo", 1, 0), ("ow", 0, 2), ("wo", 2, 0)], 0, 0)
    g["K3"] = _from_pairs(_bidirected([(0, 1), (1, 2), (0, 2)]), 0, 0)
    g["self-loop"] = _from_pairs([(0, 0), (0, 1), (1, 0)], 0, 0)
    g["triple-D"] = _from_pairs([(0, 1)] * 3 + [(1, 0)] * 2, 0, 1)
    g["bowtie"] = _from_pairs([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)], 0, 0)
    g["double-C3"] = _from_pairs([(0, 1), (1, 2), (2, 0)] * 2, 0, 0)
    g["bi-C4"] = _from_pairs(_bidirected([(0, 1), (1, 2), (2, 3), (3, 0)]), 0, 0)
    g["star3"] = _from_pairs(_bidirected([(0, 1), (0, 2), (0, 3)]), 0, 0)
    g["K3+chord"] = _from_pairs(_bidirected([(0, 1), (1, 2), (0, 2)]) + [(0, 1)], 0, 1)
    g["ladder*2"] = _from_pairs([(0, 1), (0, 1), (1, 0), (1, 2), (1, 2), (2, 1)], 0, 2)
    g["ladder*3"] = _from_pairs([(0, 1), (0, 1), (1, 0), (1, 2), (1, 2), (2, 1),
                                 (2, 3), (2, 3), (3, 2)], 0, 3)
    g["K3-loops"] = _from_pairs(_bidirected([(0, 1), (1, 2), (0, 2)]) + [(0, 0), (1, 1), (2, 2)],
                                0, 0)
    g["K4"] = _from_pairs(_bidirected([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), 0, 0)
    g["bi-C5"] = _from_pairs(_bidirected([(i, (i + 1) % 5) for i in range(5)]), 0, 0)
    return g


def chi_square_uniform(counts, support_size: int):
    """Chi-square statistic, dof and p-value of ``counts`` against the uniform law."""
    from scipy.stats import chisquare

    if support_size == 1:
        return 0.0, 0, 1.0
    obs = np.zeros(support_size)
    vals = list(counts.values())
    if len(vals) > support_size:
        raise ValueError("more observed outcomes than the support size")
    obs[:len(vals)] = vals
    res = chisquare(obs)
    return float(res.statistic), support_size - 1, float(res.pvalue)


def total_variation_uniform(counts: Counter, support_size: int) -> float:
    n = sum(counts.values())
    seen = sum(abs(c / n - 1 / support_size) for c in counts.values())
    unseen = (support_size - len(counts)) / support_size
    return 0.5 * (seen + unseen)
