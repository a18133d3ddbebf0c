from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulergibbs.arborescence import check_one_ended, past
from eulergibbs.corpus import named_graphs
from eulergibbs.digraph import ladder_family
from eulergibbs.errors import GraphError
from eulergibbs.rng import make_rng
from eulergibbs.walks import (
    FixedLength,
    HitSet,
    LeaveSet,
    Path,
    StackConfiguration,
    estimate_return_probability,
    follow_stacks,
    last_exit_arboretum,
    loop_erase,
    random_walk,
    stacks_of_path,
)

GRAPHS = named_graphs()


def test_walk_on_cycle(C3):
    p = random_walk(C3, 0, FixedLength(3), make_rng(0))
    assert p.vertices == (0, 1, 2, 0)
    assert p.edges == ("a", "b", "c")


def test_walk_hit_set_law(D):
    rng = make_rng(3)
    first = Counter()
    for _ in range(4000):
        p = random_walk(D, 0, HitSet({1}), rng)
        assert len(p) == 1
        first[p.edges[0]] += 1
    assert set(first) == {"e1", "e2"}
    assert abs(first["e1"] / 4000 - 0.5) < 0.03


def test_walk_on_ray():
    p = random_walk(ladder_family(1, 0), 0, FixedLength(4), make_rng(0))
    assert p.vertices == (0, 1, 2, 3, 4)


def test_walk_hit_set_at_start(D):
    assert random_walk(D, 1, HitSet({1})).vertices == (1,)


def test_walk_leave_set_and_cap():
    g = ladder_family(2, 1)
    p = random_walk(g, 0, LeaveSet(set(range(3))), make_rng(1))
    assert p.end not in range(3) and all(v in range(3) for v in p.vertices[:-1])
    q = random_walk(g, 0, HitSet(set()), make_rng(1), max_steps=7)
    assert q.truncated and len(q) == 7


def test_walk_dead_end():
    from eulergibbs.digraph import build_digraph

    g = build_digraph([("x", 0, 1)], 0, 1)
    p = random_walk(g, 0, FixedLength(5))
    assert p.dead_end and p.vertices == (0, 1)


def test_loop_erase_examples():
    p = Path((0, 1, 0, 2), ("e", "f", "h"))
    assert loop_erase(p) == Path((0, 2), ("h",))
    q = Path((0, 1, 2), ("x", "y"))
    assert loop_erase(q) == q
    r = Path((0, 1, 2, 1, 3), ("a", "b", "c", "d"))
    assert loop_erase(r) == Path((0, 1, 3), ("a", "d"))


def test_stacks_examples(D):
    assert stacks_of_path(Path((0, 1, 0), ("e", "f"))) == {0: ("e",), 1: ("f",)}
    p = Path((0, 1, 0, 1), ("e1", "f", "e2"))
    assert stacks_of_path(p) == {0: ("e1", "e2"), 1: ("f",)}
    assert stacks_of_path(Path((0,))) == {}


def test_follow_examples(D):
    s = StackConfiguration({0: ("e1", "e2"), 1: ("f",)})
    assert follow_stacks(0, s, D) == Path((0, 1, 0, 1), ("e1", "f", "e2"))
    assert follow_stacks(0, {}, D) == Path((0,))


def test_follow_infinite_stack_is_capped():
    from itertools import repeat

    g = ladder_family(1, 1)
    # 0 -> 1 by edge 0 and back by edge 1, forever
    p = follow_stacks(0, {0: repeat(0), 1: repeat(1)}, g, step_cap=10)
    assert p.truncated and len(p) == 10
    assert p.vertices[:4] == (0, 1, 0, 1)


def test_last_exit_examples():
    a = last_exit_arboretum(Path((0, 1, 0, 1), ("e1", "f", "e2")))
    assert a.edge_set() == {"e2"} and a.root == 1 and a.vertices == {0, 1}
    b = last_exit_arboretum(Path((0, 1, 2), ("x", "y")))
    assert b.edge_set() == {"x", "y"} and b.root == 2
    c = last_exit_arboretum(Path((5,)))
    assert c.edge_set() == frozenset() and c.vertices == {5}


def test_path_validation(D):
    with pytest.raises(GraphError):
        Path((0, 1), ())
    with pytest.raises(GraphError):
        Path((0, 1), ("f",)).check(D)
    assert Path((0, 1), ("e1",)).check(D)


def test_return_probability_examples(C3):
    est = estimate_return_probability(ladder_family(2, 1), 0, 20000, 1000, 5)
    assert est.point_estimate <= 0.5 + est.half_width_99
    ray = estimate_return_probability(ladder_family(1, 0), 0, 1000, 50, 5)
    assert ray.point_estimate == 0.0
    assert estimate_return_probability(C3, 0, 1000, 3, 5).point_estimate == 1.0
    assert estimate_return_probability(C3, 0, 1000, 2, 5).point_estimate == 0.0


def test_return_probability_is_reproducible():
    g = ladder_family(3, 2)
    a = estimate_return_probability(g, 0, 20000, 200, 11, n_threads=1)
    b = estimate_return_probability(g, 0, 20000, 200, 11, n_threads=4)
    assert a == b


def test_return_probability_rejects_bad_args(C3):
    with pytest.raises(ValueError):
        estimate_return_probability(C3, 0, 0, 3)


# ------------------------------------------------------------- properties

walks = st.tuples(st.sampled_from(sorted(GRAPHS)), st.integers(0, 40), st.integers(0, 2**32))


def _walk(case):
    name, n, seed = case
    g = GRAPHS[name]
    return g, random_walk(g, g.source, FixedLength(n), make_rng(seed))


@settings(max_examples=150, deadline=None)
@given(walks)
def test_loop_erase_properties(case):
    g, p = _walk(case)
    le = loop_erase(p)
    assert len(set(le.vertices)) == len(le.vertices)
    assert loop_erase(le) == le
    assert le.start == p.start and le.end == p.end
    it = iter(p.edges)
    assert all(e in it for e in le.edges)
    le.check(g)


@settings(max_examples=150, deadline=None)
@given(walks)
def test_stack_round_trip(case):
    g, p = _walk(case)
    assert follow_stacks(p.start, stacks_of_path(p), g) == p
    assert Path.from_json(p.to_json()) == p


@settings(max_examples=150, deadline=None)
@given(walks)
def test_last_exit_invariants(case):
    g, p = _walk(case)
    a = last_exit_arboretum(p)
    tails = [t for t, _ in a.edges.values()]
    assert len(tails) == len(set(tails))
    assert set(tails) == set(p.vertices) - {p.end}
    reach = past(a, p.end)
    assert reach == set(p.vertices)
    assert check_one_ended(a, p.vertices, len(p.vertices)).one_ended


@settings(max_examples=100, deadline=None)
@given(walks)
def test_past_is_monotone_along_arboretum_paths(case):
    g, p = _walk(case)
    a = last_exit_arboretum(p)
    for e, (t, h) in a.edges.items():
        assert past(a, t) <= past(a, h)
