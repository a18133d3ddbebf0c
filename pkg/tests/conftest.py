import pytest

from eulergibbs.corpus import named_graphs
from eulergibbs.digraph import build_digraph


@pytest.fixture
def C3():
    return build_digraph([("a", 0, 1), ("b", 1, 2), ("c", 2, 0)], 0, 0)


@pytest.fixture
def D():
    return build_digraph([("e1", 0, 1), ("e2", 0, 1), ("f", 1, 0)], 0, 1)


@pytest.fixture
def two_loop():
    return build_digraph([("ou", 0, 1), ("uo", 1, 0), ("ow", 0, 2), ("wo", 2, 0)], 0, 0)


@pytest.fixture
def K3():
    """Complete digraph on three vertices, one edge per ordered pair."""
    pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    return build_digraph([(i, t, h) for i, (t, h) in enumerate(pairs)], 0, 0)


@pytest.fixture(scope="session")
def graphs():
    return named_graphs()
