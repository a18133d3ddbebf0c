from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from eulergibbs.arborescence import enumerate_in_arborescences, validate_in_arborescence
from eulergibbs.digraph import BOUNDARY, build_digraph, contract_boundary, ladder_family
from eulergibbs.errors import RootUnreachable
from eulergibbs.rng import make_rng
from eulergibbs.wilson import (
    EXACT,
    TRUNCATED,
    decode_arborescence,
    encode_arborescence,
    horizon_doubling,
    sample_ua_exhaustion,
    sample_ua_exhaustion_batch,
    wilson_coupled,
    wilson_finite,
    wilson_finite_batch,
    wilson_infinity,
    wilson_infinity_batch,
)

N = 20000


def _law(g, rows):
    return Counter(decode_arborescence(g, r) for r in rows)


def _uniform_p(counts, support):
    obs = [counts.get(t, 0) for t in support]
    assert sum(obs) == sum(counts.values())
    return chisquare(obs).pvalue


def test_finite_examples(C3, D):
    assert wilson_finite(C3, 0, rng=1).edge_set() == {"b", "c"}
    rng = make_rng(2)
    c = Counter(wilson_finite(D, 1, rng=rng).edge_set() for _ in range(4000))
    assert set(c) == {frozenset({"e1"}), frozenset({"e2"})}
    assert _uniform_p(c, list(c)) > 0.001


def test_root_unreachable():
    g = build_digraph([("x", 0, 1), ("y", 1, 2)], 0, 2)
    with pytest.raises(RootUnreachable) as info:
        wilson_finite(g, 0)
    assert info.value.vertex == 1
    with pytest.raises(RootUnreachable):
        wilson_finite_batch(g, 0, 10)


@pytest.mark.parametrize("name", ["K3", "bi-C4", "K3+chord", "double-C3"])
def test_batch_uniform(graphs, name):
    g = graphs[name]
    z = g.sorted_vertices()[-1]
    support = enumerate_in_arborescences(g, z)
    for order in (None, g.sorted_vertices()[::-1]):
        rows = wilson_finite_batch(g, z, N, order=order, random_state=13)
        law = _law(g, rows)
        assert set(law) <= set(support)
        assert _uniform_p(law, support) > 0.001


def test_python_sampler_matches_enumeration(graphs):
    g = graphs["K3+chord"]
    support = enumerate_in_arborescences(g, 0)
    rng = make_rng(4)
    law = Counter(wilson_finite(g, 0, rng=rng).edge_set() for _ in range(5000))
    assert _uniform_p(law, support) > 0.001


def test_outputs_are_arborescences(graphs):
    for g in graphs.values():
        z = g.source
        for row in wilson_finite_batch(g, z, 50, random_state=0):
            t = decode_arborescence(g, row)
            assert validate_in_arborescence(g, t, z)
            assert np.array_equal(encode_arborescence(g, t), row)


def test_batch_is_reproducible_across_threads(graphs):
    g = graphs["bi-C5"]
    a = wilson_finite_batch(g, 0, 20000, random_state=99, n_threads=1)
    b = wilson_finite_batch(g, 0, 20000, random_state=99, n_threads=3)
    assert np.array_equal(a, b)
    c = wilson_finite_batch(g, 0, 20000, random_state=100, n_threads=1)
    assert not np.array_equal(a, c)


def test_infinity_forward_edges():
    g = ladder_family(2, 1)
    for seed in range(20):
        a = wilson_infinity(g, [0], 5000, rng=seed)
        assert a.edges
        # the branch from 0 is a self-avoiding ray of forward edges
        assert all(e % 3 in (0, 1) for e in a.edges)


def test_infinity_ray_is_exact():
    g = ladder_family(1, 0)
    for h in (1, 5):
        a = wilson_infinity(g, [0, 1, 2], h, rng=0)
        assert a.edge_of(0) == 0 and a.edge_of(1) == 1 and a.edge_of(2) == 2
    a = wilson_infinity(g, [2, 1, 0], 1, rng=0)
    assert a.flags[2] == TRUNCATED and a.flags[1] == EXACT and a.flags[0] == EXACT


def test_infinity_horizon_one_truncates_first_seed():
    a = wilson_infinity(ladder_family(2, 1), [0], 1, rng=3)
    assert a.flags[0] == TRUNCATED and a.margin(0) == 1
    assert a.truncated_vertices() == [0]
    with pytest.raises(ValueError):
        wilson_infinity(ladder_family(2, 1), [0], 0)
    with pytest.raises(ValueError):
        wilson_infinity(ladder_family(2, 1), [], 5)


def test_infinity_batch_matches_python_law():
    g = ladder_family(2, 1)
    b = wilson_infinity_batch(g, [0, 1], 300, 20000, random_state=8)
    p_batch = b.inclusion([0]).mean()
    rng = make_rng(9)
    hits = sum(wilson_infinity(g, [0, 1], 300, rng).edge_of(0) == 0 for _ in range(3000))
    p_py = hits / 3000
    se = np.sqrt(p_batch * (1 - p_batch) / 20000 + p_py * (1 - p_py) / 3000)
    assert abs(p_batch - p_py) < 4 * se
    assert abs(p_batch - 0.5) < 0.02  # symmetry of the two parallel edges
    assert set(np.unique(b.flags)) <= {1, 2}


def test_exhaustion_level_one():
    g = ladder_family(2, 1)
    c, rows = sample_ua_exhaustion_batch(g, 1, N, random_state=5)
    law = _law(c.graph, rows)
    assert set(law) == {frozenset({0}), frozenset({1})}
    assert _uniform_p(law, list(law)) > 0.001
    t = sample_ua_exhaustion(g, 1, rng=1)
    assert t.root == BOUNDARY and len(t.edges) == 1


def test_exhaustion_level_two_is_uniform():
    g = ladder_family(2, 1)
    c, rows = sample_ua_exhaustion_batch(g, 2, N, random_state=6)
    support = enumerate_in_arborescences(c.graph, BOUNDARY)
    assert _uniform_p(_law(c.graph, rows), support) > 0.001


def test_exhaustion_ray_is_deterministic():
    g = ladder_family(1, 0)
    for n in (1, 3, 6):
        t = sample_ua_exhaustion(g, n, rng=n)
        assert t.edge_set() == set(range(n))
        assert len(enumerate_in_arborescences(contract_boundary(g, n).graph, BOUNDARY)) == 1


def test_coupled_runs_agree_near_the_seeds():
    g = ladder_family(2, 1)
    out = wilson_coupled(g, [0, 1], [3, 6, 12], horizon=3000, seed=4)
    inf = out["inf"]
    for n in (6, 12):
        for v in (0, 1):
            assert out[n][v] is not None
    assert out[3].keys() <= set(range(3))
    # nested volumes give the same answer once the walks never return
    assert out[12][0] == inf.edge_of(0) or inf.flags[0] == TRUNCATED


def test_horizon_doubling_shrinks():
    g = ladder_family(2, 1)
    res = horizon_doubling(g, [0, 1], [[0], [3]], 200, 20000, random_state=1, doublings=2)
    assert res["horizons"] == [200, 400, 800]
    assert all(d < 0.03 for row in res["deltas"] for d in row)
