"""Invariant suites shared by ``eulergibbs verify`` and the acceptance tests.

Each suite returns a :class:`SuiteReport` whose JSON form depends only on
the seed and the sample sizes, never on timing or thread count.  Checks of
distributional claims use chi-square tests at level ``ALPHA``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

import numpy as np
from scipy.stats import chi2, chi2_contingency

from .arborescence import count_in_arborescences, enumerate_in_arborescences
from .corpus import (
    all_eulerian_digraphs,
    chi_square_uniform,
    named_graphs,
    random_eulerian_digraphs,
    total_variation_uniform,
)
from .digraph import contract_boundary, infer_sink, ladder_family
from .errors import InsufficientSamples
from .euler import (
    count_eulerian_paths,
    enumerate_eulerian_paths,
    is_eulerian_stack,
    prefix_law,
    sample_eulerian_batch,
    sample_gibbs_prefix_batch,
)
from .pex import (
    TransitionCounts,
    condition_on_counts_batch,
    test_gibbs_property,
    test_partial_exchangeability,
    transition_counts,
)
from .rng import make_rng
from .walks import (
    FixedLength,
    StackConfiguration,
    estimate_return_probability,
    follow_stacks,
    loop_erase,
    random_walk,
    stacks_of_path,
)
from .wilson import encode_arborescence, sample_ua_exhaustion_batch, wilson_finite_batch, \
    wilson_infinity_batch

ALPHA = 0.01
DEFAULT_SAMPLES = 10**5
DEFAULT_HORIZON = 10**4


@dataclass
class Check:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"name": self.name, "passed": bool(self.passed), **self.details}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {"suite": self.suite, "seed": self.seed, "samples": self.samples,
                "passed": self.passed, "checks": [c.to_json() for c in self.checks]}


class _Streams:
    """Independent generators for the checks of one suite run."""

    def __init__(self, seed, suite_index):
        self.seed = seed
        self.base = 1000 * (suite_index + 1)
        self.i = 0

    def next(self):
        self.i += 1
        return make_rng(self.seed, self.base + self.i)


def row_counts(rows) -> dict:
    """Distinct rows of a 2-d integer array and their multiplicities."""
    rows = np.asarray(rows)
    if rows.shape[0] == 0:
        return {}
    uniq, cnt = np.unique(rows, axis=0, return_counts=True)
    return {tuple(int(x) for x in r): int(c) for r, c in zip(uniq, cnt)}


def chi_square_against(counts: dict, probs: dict):
    """Goodness of fit of ``counts`` to ``probs``; outcomes outside the support fail."""
    n = sum(counts.values())
    outside = sum(c for x, c in counts.items() if x not in probs)
    stat = 0.0
    for x, p in probs.items():
        e = n * float(p)
        stat += (counts.get(x, 0) - e) ** 2 / e
    dof = len(probs) - 1
    pv = float(chi2.sf(stat, dof)) if dof > 0 else 1.0
    if outside:
        pv = 0.0
    return {"statistic": stat, "dof": dof, "p_value": pv, "outside_support": outside,
            "min_expected": n * float(min(probs.values()))}


def _uniform_check(name, counts, members, extra=None):
    support = set(members)
    outside = sum(c for x, c in counts.items() if x not in support)
    stat, dof, pv = chi_square_uniform(
        {x: counts.get(x, 0) for x in support}, len(support))
    if outside:
        pv = 0.0
    details = {"statistic": stat, "dof": dof, "p_value": pv, "support": len(support),
               "outside_support": outside}
    details.update(extra or {})
    return Check(name, pv > ALPHA and not outside, details)


# --------------------------------------------------------------------- best


def _stack_bijection(g):
    """Every configuration passing ``is_eulerian_stack`` vs the enumerated paths."""
    o, z = g.source, infer_sink(g)
    vs = g.sorted_vertices()
    paths = {p.edges for p in enumerate_eulerian_paths(g)}
    images = []
    for combo in product(*(permutations(g.out_edges(v)) for v in vs)):
        s = StackConfiguration(dict(zip(vs, combo)))
        if is_eulerian_stack(g, o, z, s):
            images.append(follow_stacks(o, s, g).edges)
    back = all(is_eulerian_stack(g, o, z, stacks_of_path(p))
               for p in enumerate_eulerian_paths(g))
    return len(images) == len(set(images)) and set(images) == paths and back


def suite_best(seed, samples=None, max_edges=6, random_count=100, random_max_edges=10):
    exhaustive = all_eulerian_digraphs(max_edges)
    random = random_eulerian_digraphs(random_count, random_max_edges, seed=seed)
    checks = []
    for label, corpus in (("exhaustive", exhaustive), ("random", random)):
        best_bad, tree_bad, roots = [], [], 0
        for i, g in enumerate(corpus):
            if count_eulerian_paths(g) != len(enumerate_eulerian_paths(g)):
                best_bad.append(i)
            # every vertex as root, not only the sink
            for z in g.sorted_vertices():
                roots += 1
                if count_in_arborescences(g, z) != len(enumerate_in_arborescences(g, z)):
                    tree_bad.append([i, z])
        info = {"graphs": len(corpus), "max_edges": max(len(g) for g in corpus)}
        checks.append(Check(f"best_formula_{label}", not best_bad,
                            {**info, "mismatches": best_bad}))
        checks.append(Check(f"matrix_tree_{label}", not tree_bad,
                            {**info, "roots_checked": roots, "mismatches": tree_bad}))
    bad = [i for i, g in enumerate(exhaustive) if not _stack_bijection(g)]
    checks.append(Check("stack_characterization_exhaustive", not bad,
                        {"graphs": len(exhaustive), "mismatches": bad}))
    return checks


# ------------------------------------------------------------------- wilson


def wilson_graphs():
    out = {}
    for name, g in named_graphs().items():
        z = infer_sink(g)
        if 2 <= count_in_arborescences(g, z) <= 30:
            out[name] = g
    return out


def _vertex_orders(g, z, rng):
    vs = [v for v in g.sorted_vertices() if v != z]
    shuffled = [vs[i] for i in rng.permutation(len(vs))]
    return {"sorted": vs, "reversed": vs[::-1], "shuffled": shuffled}


def _cylinder_checks(samples, horizon, streams, n=8):
    g = ladder_family(2, 1)
    # level-0 forward edges 0, 1 and level-1 forward edges 3, 4
    events = [(0,), (1,), (3,), (0, 3), (1, 4)]
    inf = wilson_infinity_batch(g, [0, 1], horizon, samples, record=[0, 1],
                                random_state=streams.next())
    p_inf = [float(inf.inclusion(ev).mean()) for ev in events]
    checks = []
    for label, gg, nn in (("V_n", g, n), ("V_2n", ladder_family(2, 1, exhaustion_step=2), n // 2)):
        c, rows = sample_ua_exhaustion_batch(gg, nn, samples, random_state=streams.next())
        cg = c.graph.compiled
        res = []
        ok = True
        for ev, pi in zip(events, p_inf):
            hit = np.ones(rows.shape[0], dtype=bool)
            for e in ev:
                j = cg.edge_index[e]
                hit &= rows[:, cg.tail[j]] == j
            pe = float(hit.mean())
            se = math.sqrt(pe * (1 - pe) / samples + pi * (1 - pi) / samples)
            good = abs(pe - pi) < 3 * se
            ok &= good
            res.append({"edges": list(ev), "p_exhaustion": pe, "p_infinity": pi,
                        "combined_se": se, "passed": bool(good)})
        trunc = float((inf.flags == 2).mean())
        checks.append(Check(f"cylinder_{label}", ok,
                            {"exhaustion_index": nn, "volume": len(c.inner), "horizon": horizon,
                             "events": res, "truncated_flag_rate": trunc}))
    return checks


def suite_wilson(seed, samples=DEFAULT_SAMPLES, horizon=DEFAULT_HORIZON):
    streams = _Streams(seed, 1)
    checks = []
    for name, g in wilson_graphs().items():
        z = infer_sink(g)
        members = [tuple(int(x) for x in encode_arborescence(g, a))
                   for a in enumerate_in_arborescences(g, z)]
        for label, order in _vertex_orders(g, z, streams.next()).items():
            rows = wilson_finite_batch(g, z, samples, order=order, random_state=streams.next())
            checks.append(_uniform_check(f"wilson_uniform[{name},{label}]", row_counts(rows),
                                         members))
    checks += _cylinder_checks(samples, horizon, streams)
    return checks


# -------------------------------------------------------------------- euler


def euler_graphs():
    out = {}
    for name, g in named_graphs().items():
        if 2 <= count_eulerian_paths(g) <= 50:
            out[name] = g
    return out


def last_exit_rows(g, rows):
    """Last-exit arborescence of each sampled path, in the wilson row encoding."""
    cg = g.compiled
    n = rows.shape[0]
    last = np.full((n, cg.n_vertices), -1, dtype=np.int64)
    ar = np.arange(n)
    for t in range(rows.shape[1]):
        e = rows[:, t]
        last[ar, cg.tail[e]] = e
    last[:, cg.index[infer_sink(g)]] = -1
    return last


def _two_sample(name, a: dict, b: dict):
    keys = sorted(set(a) | set(b))
    table = np.array([[a.get(k, 0) for k in keys], [b.get(k, 0) for k in keys]])
    if len(keys) < 2:
        return Check(name, True, {"p_value": 1.0, "cells": len(keys)})
    res = chi2_contingency(table, correction=False)
    return Check(name, res.pvalue > ALPHA,
                 {"statistic": float(res.statistic), "dof": int(res.dof),
                  "p_value": float(res.pvalue), "cells": len(keys)})


def _round_trips(rng, walks=10**4):
    graphs = list(named_graphs().values())
    bad_stack = bad_le = 0
    for i in range(walks):
        g = graphs[i % len(graphs)]
        start = g.sorted_vertices()[int(rng.integers(len(g.vertices)))]
        p = random_walk(g, start, FixedLength(int(rng.integers(0, 40))), rng)
        if follow_stacks(p.start, stacks_of_path(p), g) != p:
            bad_stack += 1
        le = loop_erase(p)
        it = iter(p.edges)
        ok = (loop_erase(le) == le and len(set(le.vertices)) == len(le.vertices)
              and all(e in it for e in le.edges) and le.start == p.start and le.end == p.end)
        bad_le += not ok
    return [Check("follow_stacks_round_trip", bad_stack == 0,
                  {"walks": walks, "failures": bad_stack}),
            Check("loop_erase_idempotent_self_avoiding", bad_le == 0,
                  {"walks": walks, "failures": bad_le})]


def suite_euler(seed, samples=DEFAULT_SAMPLES, tv_tol=0.02, walks=10**4):
    streams = _Streams(seed, 2)
    checks = []
    for name, g in euler_graphs().items():
        cg = g.compiled
        members = [tuple(cg.edge_index[e] for e in p.edges) for p in enumerate_eulerian_paths(g)]
        rows = sample_eulerian_batch(g, samples, random_state=streams.next())
        counts = row_counts(rows)
        tv = total_variation_uniform(counts, len(members))
        chk = _uniform_check(f"euler_uniform[{name}]", counts, members, {"tv": tv})
        chk.passed = chk.passed and tv < tv_tol
        checks.append(chk)
    for name in ("D", "K3", "bi-C4", "K3+chord", "ladder*3"):
        g = named_graphs()[name]
        z = infer_sink(g)
        paths = sample_eulerian_batch(g, samples, random_state=streams.next())
        trees = wilson_finite_batch(g, z, samples, random_state=streams.next())
        checks.append(_two_sample(f"last_exit_vs_wilson[{name}]",
                                  row_counts(last_exit_rows(g, paths)), row_counts(trees)))
    checks += _round_trips(streams.next(), walks)
    return checks


# --------------------------------------------------------------- transience


def suite_transience(seed, samples=DEFAULT_SAMPLES, horizon=DEFAULT_HORIZON):
    streams = _Streams(seed, 3)
    checks = []
    for p in (2, 3, 5):
        est = estimate_return_probability(ladder_family(p, p - 1), 0, samples, horizon,
                                          streams.next())
        bound = (p - 1) / p
        checks.append(Check(f"return_bound[ladder({p},{p - 1})]",
                            est.point_estimate <= bound + 3 * est.half_width_99,
                            {**est.to_json(), "bound": bound}))
    est = estimate_return_probability(ladder_family(1, 0), 0, min(samples, 1000), 100,
                                      streams.next())
    checks.append(Check("return_zero[ladder(1,0)]", est.point_estimate == 0, est.to_json()))
    return checks


# ---------------------------------------------------------------------- pex


def pex_instances():
    """Count instances for the conditioned-sampler checks."""
    return {
        "three-edge": TransitionCounts(0, {(0, 0): 1, (0, 1): 1, (1, 0): 1}),
        "D": TransitionCounts(0, {(0, 1): 2, (1, 0): 1}),
        "K3-circuit": transition_counts((0, 1, 2, 0, 2, 1, 0)),
        "ladder-walk": transition_counts((0, 1, 0, 1, 2, 1, 2, 3, 2, 3)),
        "named-states": transition_counts(("a", "b", "a", "c", "b", "c", "a", "a")),
        "loops": transition_counts((0, 0, 1, 1, 0, 2, 2, 0, 1)),
    }


def suite_pex(seed, samples=DEFAULT_SAMPLES):
    streams = _Streams(seed, 4)
    checks = []
    for name, c in pex_instances().items():
        seqs = None

        def sampler(n, rng, c=c):
            nonlocal seqs
            seqs = condition_on_counts_batch(c, n, random_state=rng)
            return seqs

        m = c.length
        try:
            rep = test_partial_exchangeability(sampler, m, samples, streams.next())
            ok, details = rep.passed(ALPHA), rep.to_json()
        except InsufficientSamples as exc:
            ok, details = False, {"error": str(exc)}
        same = all(transition_counts(s) == c for s in seqs)
        ok = ok and same
        details["counts_reproduced"] = same
        if name == "three-edge":
            freq = {str(k): v / samples for k, v in sorted(_tally(seqs).items())}
            near = all(abs(f - 0.5) <= 0.005 for f in freq.values()) and len(freq) == 2
            details["frequencies"] = freq
            ok = ok and near
        checks.append(Check(f"partial_exchangeability[{name}]", ok, details))
        if m >= 4:
            try:
                rep = test_partial_exchangeability(sampler, m - 2, samples, streams.next())
                checks.append(Check(f"partial_exchangeability_prefix[{name}]",
                                    rep.passed(ALPHA), rep.to_json()))
            except InsufficientSamples as exc:
                checks.append(Check(f"partial_exchangeability_prefix[{name}]", True,
                                    {"vacuous": str(exc)}))
    # power: a sampler that never produces one member must be rejected
    biased = test_partial_exchangeability(lambda n, rng: [(0, 0, 1, 0)] * n,
                                          3, samples, streams.next())
    checks.append(Check("detects_biased_sampler", biased.p_value < 1e-6, biased.to_json()))
    return checks


def _tally(seqs):
    out: dict = {}
    for s in seqs:
        out[s] = out.get(s, 0) + 1
    return out


# -------------------------------------------------------------------- gibbs


#: cut index per graph; D, two-loop and C3 have one prefix path per suffix
#: (vacuous passes), the others have suffix classes with several prefixes
GIBBS_CUTS = {"D": 1, "two-loop": 2, "C3": 1, "K3": 4, "triple-D": 3, "double-C3": 4,
              "bi-C4": 5, "star3": 4, "K3+chord": 4, "ladder*3": 5, "K3-loops": 5, "K4": 6}


def gibbs_prefix_oracle(k=4, n=6):
    """Exact law of the first ``k`` edges of a uniform Eulerian path of ``G_n^*``."""
    c = contract_boundary(ladder_family(2, 1), n)
    paths = enumerate_eulerian_paths(c.graph)
    return prefix_law(paths, k), len(paths)


def suite_gibbs(seed, samples=DEFAULT_SAMPLES, horizon=DEFAULT_HORIZON, k=4, n=6):
    streams = _Streams(seed, 5)
    checks = []
    law, n_paths = gibbs_prefix_oracle(k, n)
    g = ladder_family(2, 1)
    b = sample_gibbs_prefix_batch(g, k, horizon, samples, random_state=streams.next())
    cg = b.graph
    probs = {tuple(cg.edge_index[e] for e in pre): Fraction(p) for pre, p in law.items()}
    res = chi_square_against(row_counts(b.edges), probs)
    taint = float(b.tainted.mean())
    exhausted = int(b.exhausted.sum())
    res.update({"tainted_fraction": taint, "exhausted": exhausted, "horizon": horizon,
                "k": k, "oracle_volume": n, "oracle_paths": n_paths,
                "truncated_stack_mean": float(b.truncated_stacks.mean())})
    checks.append(Check("gibbs_prefix_law[ladder(2,1)]",
                        res["p_value"] > ALPHA and taint <= 0.01 and exhausted == 0, res))
    for name, cut in GIBBS_CUTS.items():
        gg = named_graphs()[name]
        try:
            rep = test_gibbs_property(gg, cut, samples, streams.next())
            checks.append(Check(f"gibbs_property[{name},n={cut}]", rep.passed(ALPHA),
                                rep.to_json()))
        except InsufficientSamples as exc:
            checks.append(Check(f"gibbs_property[{name},n={cut}]", False, {"error": str(exc)}))
    return checks


SUITES = {
    "best": suite_best,
    "wilson": suite_wilson,
    "euler": suite_euler,
    "pex": suite_pex,
    "gibbs": suite_gibbs,
    "transience": suite_transience,
}


def run_suite(name: str, seed: int, samples: int | None = None, **kwargs) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    fn = SUITES[name]
    if samples is not None and name != "best":
        kwargs["samples"] = samples
    checks = fn(seed, **kwargs)
    used = samples if samples is not None else (0 if name == "best" else DEFAULT_SAMPLES)
    return SuiteReport(name, seed, used, checks)
