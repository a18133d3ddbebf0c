import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulergibbs.arborescence import (
    BoundExceeded,
    InArboretum,
    OracleArboretum,
    bareiss_determinant,
    check_one_ended,
    count_in_arborescences,
    enumerate_in_arborescences,
    past,
    validate_in_arborescence,
)
from eulergibbs.corpus import random_eulerian_digraphs
from eulergibbs.errors import CapExceeded

half_line = OracleArboretum(lambda v: [v - 1] if v > 0 else [])
line = OracleArboretum(lambda v: [v - 1])


def test_validate_examples(C3, D):
    assert validate_in_arborescence(C3, {"b", "c"}, 0)
    assert validate_in_arborescence(D, {"e1"}, 1)
    bad = validate_in_arborescence(D, {"e1", "e2"}, 1)
    assert not bad and bad.vertex == 0
    assert validate_in_arborescence(D, {"f"}, 0)


def test_validate_rejections(C3):
    assert not validate_in_arborescence(C3, {"b"}, 0)           # 1 has no out-edge
    assert not validate_in_arborescence(C3, {"a", "b", "c"}, 0)  # root has an out-edge
    assert not validate_in_arborescence(C3, {"zz"}, 0)


def test_past_examples(C3):
    assert past(half_line, 3) == {0, 1, 2, 3}
    a = InArboretum({"b": (1, 2), "c": (2, 0)}, frozenset({0, 1, 2}), root=0)
    assert past(a, 2) == {1, 2}
    assert past(a, 1) == {1}


def test_one_ended_examples():
    rep = check_one_ended(half_line, range(11), 100)
    assert rep.one_ended and rep.verdicts == {v: v + 1 for v in range(11)}
    assert past(line, 0, bound=50) == BoundExceeded(50)
    rep = check_one_ended(line, [0], 50)
    assert not rep.one_ended and rep.verdicts == {0: None}


def test_enumerate_examples(C3, D, K3):
    assert enumerate_in_arborescences(C3, 0) == [frozenset({"b", "c"})]
    assert sorted(enumerate_in_arborescences(D, 1), key=sorted) == [{"e1"}, {"e2"}]
    assert len(enumerate_in_arborescences(K3, 0)) == 3


def test_enumerate_cap(K3):
    with pytest.raises(CapExceeded):
        enumerate_in_arborescences(K3, 0, cap=2)


def test_count_examples(C3, D, K3):
    assert count_in_arborescences(C3, 0) == 1
    assert count_in_arborescences(D, 1) == 2
    assert [count_in_arborescences(K3, z) for z in range(3)] == [3, 3, 3]


def test_count_zero_when_unreachable():
    from eulergibbs.digraph import build_digraph

    g = build_digraph([("x", 0, 1)], 0, 1)
    assert count_in_arborescences(g, 0) == 0
    assert enumerate_in_arborescences(g, 0) == []


def test_count_matches_enumeration_on_random_graphs():
    for g in random_eulerian_digraphs(60, max_edges=10, seed=3):
        for z in g.sorted_vertices():
            trees = enumerate_in_arborescences(g, z)
            assert count_in_arborescences(g, z) == len(trees)
            assert all(validate_in_arborescence(g, t, z) for t in trees)


def test_bareiss_edge_cases():
    assert bareiss_determinant([]) == 1
    assert bareiss_determinant([[0, 1], [1, 0]]) == -1
    assert bareiss_determinant([[1, 2], [2, 4]]) == 0
    big = [[10**30, 1], [1, 10**30]]
    assert bareiss_determinant(big) == 10**60 - 1


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_bareiss_matches_float_determinant(mat):
    assert bareiss_determinant(mat) == round(np.linalg.det(np.array(mat, dtype=float)))
