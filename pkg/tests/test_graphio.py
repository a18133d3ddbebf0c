import pytest

from eulergibbs.digraph import LazyDigraph
from eulergibbs.errors import GraphFormatError
from eulergibbs.graphio import (
    format_counts,
    format_graph,
    parse_counts,
    parse_graph,
    parse_sequence,
    parse_token,
    read_graph,
)
from eulergibbs.pex import TransitionCounts

D_TEXT = """eulergraph 1
# graph D
edge e1 0 1
edge e2 0 1
edge f 1 0
source 0
sink 1
"""


def test_parse_token():
    assert parse_token("12") == 12 and parse_token("x1") == "x1" and parse_token("-1") == "-1"


def test_parse_d(D):
    g = parse_graph(D_TEXT)
    assert g.edges == D.edges and g.source == 0 and g.sink == 1


def test_round_trip(graphs, tmp_path):
    for g in graphs.values():
        h = parse_graph(format_graph(g))
        assert h.edges == g.edges and h.source == g.source and h.sink == g.sink
    path = tmp_path / "d.graph"
    path.write_text(D_TEXT)
    assert read_graph(path).edges == parse_graph(D_TEXT).edges


def test_family():
    g = parse_graph("eulergraph 1\nfamily ladder 2 1\n")
    assert isinstance(g, LazyDigraph) and g.family == ("ladder", 2, 1)
    assert parse_graph(format_graph(g)).family == ("ladder", 2, 1)


@pytest.mark.parametrize("text,line,column", [
    ("", 1, 1),
    ("graph 1\n", 1, 1),
    ("eulergraph 2\n", 1, 12),
    ("eulergraph 1\nedge a 0\nsource 0\n", 2, 9),
    ("eulergraph 1\nedge a 0 1\nedge a 1 0\nsource 0\n", 3, 6),
    ("eulergraph 1\nedge a 0 1\nvertex 3\nsource 0\n", 3, 1),
    ("eulergraph 1\nedge a 0 1\n", 3, 1),
    ("eulergraph 1\nfamily ladder x 1\n", 2, 15),
    ("eulergraph 1\nfamily ladder 0 1\n", 2, 15),
    ("eulergraph 1\nfamily grid 2 1\n", 2, 8),
    ("eulergraph 1\nfamily ladder 2 1\nedge a 0 1\n", 2, 1),
    ("eulergraph 1\nsource 0\nsource 1\nedge a 0 1\n", 3, 1),
])
def test_format_errors(text, line, column):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_counts_format():
    c = parse_counts("start 0\ncount 0 0 1\ncount 0 1 1\ncount 1 0 1\n")
    assert c == TransitionCounts(0, {(0, 0): 1, (0, 1): 1, (1, 0): 1})
    assert parse_counts(format_counts(c)) == c
    with pytest.raises(GraphFormatError) as info:
        parse_counts("start 0\ncount 0 1 x\n")
    assert (info.value.line, info.value.column) == (2, 11)
    with pytest.raises(GraphFormatError):
        parse_counts("count 0 1 1\n")
    with pytest.raises(GraphFormatError):
        parse_counts("start 0\ncount 0 1 1\ncount 0 1 2\n")


def test_sequence_format():
    assert parse_sequence("0\n1\n\nb\n") == (0, 1, "b")
    with pytest.raises(GraphFormatError) as info:
        parse_sequence("0\n1 2\n")
    assert (info.value.line, info.value.column) == (2, 3)
