"""Partially exchangeable sequences and their transition counts.

Conditioning a partially exchangeable process on its start and transition
counts gives a uniform Eulerian path in the multigraph with ``M(u, v)``
parallel edges ``u -> v``; this module provides that reduction and
chi-square checks of partial exchangeability and of the Gibbs property.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.stats import chi2

from .digraph import Digraph, EulerianKind, classify_eulerian
from .errors import (
    DisconnectedCounts,
    EmptySequence,
    InsufficientSamples,
    NoEulerianEndpoint,
)
from .euler import enumerate_eulerian_paths, sample_eulerian_batch, sample_eulerian_finite
from .rng import as_generator

#: default class-admission threshold (expected count per member) and level
MIN_EXPECTED = 20
ALPHA = 0.01


@dataclass(frozen=True)
class TransitionCounts:
    start: object
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: int(m) for k, m in self.counts.items() if m}
        if any(m < 0 for m in clean.values()):
            raise ValueError("transition counts must be non-negative")
        object.__setattr__(self, "counts", clean)

    def __getitem__(self, uv):
        return self.counts.get(uv, 0)

    @property
    def length(self):
        return sum(self.counts.values())

    def key(self):
        return (self.start, frozenset(self.counts.items()))

    def __hash__(self):
        return hash(self.key())


def transition_counts(seq: Sequence) -> TransitionCounts:
    """Start state and tally of consecutive pairs.

    >>> transition_counts((0, 1, 0, 1, 2)).counts == {(0, 1): 2, (1, 0): 1, (1, 2): 1}
    True
    """
    seq = tuple(seq)
    if not seq:
        raise EmptySequence("need at least one state")
    return TransitionCounts(seq[0], Counter(zip(seq, seq[1:])))


def pex_equivalent(x: Sequence, y: Sequence) -> bool:
    """Same length, same first state, same transition counts."""
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        return False
    if not x:
        return True
    return transition_counts(x) == transition_counts(y)


def _ordered_states(states):
    try:
        return sorted(states)
    except TypeError:
        return sorted(states, key=lambda s: (type(s).__name__, repr(s)))


@dataclass(frozen=True)
class CountsGraph:
    """Multigraph of a :class:`TransitionCounts`; vertex ``i`` is ``states[i]``."""

    graph: Digraph
    end: object
    states: list

    def to_states(self, vertices):
        return tuple(self.states[v] for v in vertices)


def digraph_from_counts(c: TransitionCounts) -> CountsGraph:
    """``M(u, v)`` parallel edges ``u -> v`` with fresh ids; end state from degree balance."""
    states = {c.start}
    for u, v in c.counts:
        states.add(u)
        states.add(v)
    order = _ordered_states(states)
    idx = {s: i for i, s in enumerate(order)}
    edges = {}
    imbalance = Counter()
    for (u, v) in sorted(c.counts, key=lambda uv: (idx[uv[0]], idx[uv[1]])):
        for _ in range(c.counts[(u, v)]):
            edges[len(edges)] = (idx[u], idx[v])
        imbalance[u] += c.counts[(u, v)]
        imbalance[v] -= c.counts[(u, v)]
    o = idx[c.start]
    surplus = [s for s in order if imbalance[s] > 0]
    deficit = [s for s in order if imbalance[s] < 0]
    if not surplus and not deficit:
        end = c.start
    elif (surplus == [c.start] and imbalance[c.start] == 1
          and len(deficit) == 1 and imbalance[deficit[0]] == -1):
        end = deficit[0]
    else:
        bad = (surplus + deficit)[0]
        raise NoEulerianEndpoint(
            f"state {bad!r} has out-minus-in {imbalance[bad]}; no Eulerian path fits")
    g = Digraph(edges, o, idx[end], vertices=range(len(order)))
    cls = classify_eulerian(g)
    if cls.kind is EulerianKind.NOT_EULERIAN:
        raise DisconnectedCounts(f"counts are not connected: {cls.reason} "
                                 f"(state {order[cls.witness.vertex]!r})")
    return CountsGraph(g, end, order)


def condition_on_counts(c: TransitionCounts, rng=None) -> tuple:
    """A sequence drawn from the unique partially exchangeable law with these counts."""
    cg = digraph_from_counts(c)
    p = sample_eulerian_finite(cg.graph, as_generator(rng))
    return cg.to_states(p.vertices)


def condition_on_counts_batch(c: TransitionCounts, n_samples: int, random_state=None,
                              n_threads=None) -> list:
    """``n_samples`` draws of :func:`condition_on_counts` via the compiled sampler."""
    cgr = digraph_from_counts(c)
    g = cgr.graph
    if len(g) == 0:
        return [(c.start,)] * n_samples
    rows = sample_eulerian_batch(g, n_samples, random_state=random_state, n_threads=n_threads)
    comp = g.compiled
    state_of = np.array([cgr.states[v] for v in comp.vertex_ids], dtype=object)
    start = comp.index[g.source]
    idx = np.concatenate([np.full((rows.shape[0], 1), start, dtype=np.int64),
                          comp.head[rows]], axis=1)
    return [tuple(r) for r in state_of[idx]]


def transition_frequencies(seq: Sequence) -> dict:
    """``Q(u, v)``: share of departures from ``u`` that went to ``v`` (exact fractions)."""
    seq = tuple(seq)
    if len(seq) < 2:
        raise EmptySequence("need at least two states")
    pairs = Counter(zip(seq, seq[1:]))
    visits = Counter(seq[:-1])
    return {(u, v): Fraction(m, visits[u]) for (u, v), m in pairs.items()}


# ------------------------------------------------------------ statistical tests


@dataclass(frozen=True)
class PexTestReport:
    classes_tested: int
    statistic: float
    dof: int
    p_value: float
    samples: int
    classes_skipped: int = 0
    mismatches: int = 0

    def passed(self, alpha=ALPHA):
        return self.mismatches == 0 and self.p_value > alpha

    def to_json(self):
        return {"statistic": self.statistic, "dof": self.dof, "p_value": self.p_value,
                "classes": self.classes_tested, "classes_skipped": self.classes_skipped,
                "samples": self.samples, "mismatches": self.mismatches}


def _chi_square_classes(classes, min_expected):
    """``classes``: iterable of (observed Counter, member list)."""
    stat, dof, tested, skipped, mismatches, n = 0.0, 0, 0, 0, 0, 0
    for observed, members in classes:
        total = sum(observed.values())
        n += total
        members = set(members)
        mismatches += sum(c for x, c in observed.items() if x not in members)
        k = len(members)
        if k <= 1:
            continue
        expected = total / k
        if expected < min_expected:
            skipped += 1
            continue
        tested += 1
        dof += k - 1
        stat += sum((observed.get(x, 0) - expected) ** 2 / expected for x in members)
    p = float(chi2.sf(stat, dof)) if dof else 1.0
    if mismatches:
        p = 0.0
    if dof == 0 and skipped:
        raise InsufficientSamples(
            f"{skipped} multi-member classes, none with {min_expected} expected per member")
    return PexTestReport(tested, float(stat), dof, p, n, skipped, mismatches)


def pex_class_members(x: Sequence) -> list:
    """All sequences ``y`` with ``y ~ x`` (same start, same transition counts)."""
    c = transition_counts(x)
    cg = digraph_from_counts(c)
    if len(cg.graph) == 0:
        return [tuple(x)]
    return sorted({cg.to_states(p.vertices) for p in enumerate_eulerian_paths(cg.graph)},
                  key=repr)


def test_partial_exchangeability(sampler: Callable, prefix_len: int, samples: int,
                                 rng=None, min_expected: int = MIN_EXPECTED) -> PexTestReport:
    """Chi-square test that ``~``-equivalent prefixes are equally likely.

    ``sampler(n, rng)`` returns ``n`` sequences of at least ``prefix_len + 1``
    states; prefixes ``X_0..X_prefix_len`` are grouped by start and transition
    counts and each admitted class is tested for equiprobability of all its
    members (observed or not).
    """
    rng = as_generator(rng)
    seqs = sampler(samples, rng)
    groups: dict = {}
    for s in seqs:
        s = tuple(s)
        if len(s) < prefix_len + 1:
            raise ValueError(f"sampled sequence shorter than {prefix_len + 1} states")
        pre = s[:prefix_len + 1]
        groups.setdefault(transition_counts(pre).key(), Counter())[pre] += 1
    classes = ((obs, pex_class_members(next(iter(obs)))) for obs in groups.values())
    return _chi_square_classes(classes, min_expected)


test_partial_exchangeability.__test__ = False


def test_gibbs_property(g: Digraph, n: int, samples: int, rng=None,
                        min_expected: int = MIN_EXPECTED) -> PexTestReport:
    """Given the steps after ``n``, the first ``n`` steps must be uniform Eulerian.

    Samples uniform Eulerian paths of ``g``, bins them by their suffix, and
    compares each bin's prefixes with the enumerated Eulerian paths from the
    source to ``X_n`` on the prefix edges.
    """
    m = len(g)
    if not 1 <= n < m:
        raise ValueError("need 1 <= n < number of edges")
    rows = sample_eulerian_batch(g, samples, random_state=rng)
    comp = g.compiled
    bins: dict = {}
    for r in rows:
        bins.setdefault(tuple(r[n:]), Counter())[tuple(r[:n])] += 1

    def members(suffix):
        used = {comp.edge_ids[j] for j in suffix}
        prefix_edges = [e for e in g.edges if e not in used]
        x_n = comp.vertex_ids[comp.tail[suffix[0]]]
        sub = g.subgraph(prefix_edges, g.source, x_n)
        return [tuple(comp.edge_index[e] for e in p.edges)
                for p in enumerate_eulerian_paths(sub)]

    classes = ((obs, members(suffix)) for suffix, obs in bins.items())
    return _chi_square_classes(classes, min_expected)


test_gibbs_property.__test__ = False
