"""Text formats for graphs, transition counts and state sequences.

Graph files::

    eulergraph 1
    # comment
    edge <edge-id> <tail> <head>
    source <v>
    sink <v>            (optional)

or a lazy family in place of the edge lines: ``family ladder <p> <q>``.
Counts files hold ``start <state>`` and lines ``count <u> <v> <m>``.
Sequence files hold one state token per line.  Tokens made of decimal
digits are read as integers, anything else as strings.
"""

from __future__ import annotations

import re

from .digraph import Digraph, LazyDigraph, build_digraph, ladder_family, sort_key
from .errors import DuplicateEdgeId, EmptyGraph, GraphError, GraphFormatError
from .pex import TransitionCounts

HEADER = "eulergraph"
VERSION = "1"

_TOKEN = re.compile(r"\S+")


def parse_token(text: str):
    return int(text) if text.isdigit() else text


def _lines(text):
    """Yield ``(line_no, [(column, word), ...])`` for meaningful lines."""
    for no, raw in enumerate(text.splitlines(), start=1):
        words = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(raw)]
        if not words or words[0][1].startswith("#"):
            continue
        yield no, words


def _arity(no, words, n):
    if len(words) != n:
        col = words[n][0] if len(words) > n else len(" ".join(w for _, w in words)) + 1
        raise GraphFormatError(f"{words[0][1]!r} takes {n - 1} arguments, got {len(words) - 1}",
                               no, col)


def _nonneg_int(no, col, word, what):
    if not word.isdigit():
        raise GraphFormatError(f"{what} must be a non-negative integer, got {word!r}", no, col)
    return int(word)


def parse_graph(text: str) -> Digraph | LazyDigraph:
    lines = list(_lines(text))
    if not lines:
        raise GraphFormatError(f"empty file, expected header '{HEADER} {VERSION}'", 1, 1)
    no, words = lines[0]
    if words[0][1] != HEADER:
        raise GraphFormatError(f"expected header '{HEADER} {VERSION}'", no, words[0][0])
    _arity(no, words, 2)
    if words[1][1] != VERSION:
        raise GraphFormatError(f"unsupported version {words[1][1]!r}", no, words[1][0])

    edges, seen = [], {}
    source = sink = family = None
    for no, words in lines[1:]:
        kind = words[0][1]
        if kind == "edge":
            _arity(no, words, 4)
            e, t, h = (parse_token(w) for _, w in words[1:])
            if e in seen:
                raise GraphFormatError(f"duplicate edge id {e!r} (first on line {seen[e]})",
                                       no, words[1][0])
            seen[e] = no
            edges.append((e, t, h))
        elif kind in ("source", "sink"):
            _arity(no, words, 2)
            v = parse_token(words[1][1])
            if (source if kind == "source" else sink) is not None:
                raise GraphFormatError(f"{kind} given twice", no, words[0][0])
            if kind == "source":
                source = (v, no, words[1][0])
            else:
                sink = (v, no, words[1][0])
        elif kind == "family":
            if family is not None:
                raise GraphFormatError("family given twice", no, words[0][0])
            if len(words) < 2 or words[1][1] != "ladder":
                col = words[1][0] if len(words) > 1 else words[0][0]
                raise GraphFormatError("only 'family ladder <p> <q>' is supported", no, col)
            _arity(no, words, 4)
            p = _nonneg_int(no, words[2][0], words[2][1], "p")
            q = _nonneg_int(no, words[3][0], words[3][1], "q")
            if p < 1:
                raise GraphFormatError("ladder needs p >= 1", no, words[2][0])
            family = (p, q, no)
        else:
            raise GraphFormatError(f"unknown directive {kind!r}", no, words[0][0])

    if family is not None:
        if edges or sink is not None:
            raise GraphFormatError("a family file cannot also list edges or a sink", family[2], 1)
        g = ladder_family(family[0], family[1])
        if source is not None and source[0] != g.source:
            raise GraphFormatError("ladder families have source 0", source[1], source[2])
        return g
    if source is None:
        raise GraphFormatError("missing 'source' line", lines[-1][0] + 1, 1)
    try:
        return build_digraph(edges, source[0], None if sink is None else sink[0])
    except (DuplicateEdgeId, EmptyGraph) as exc:
        raise GraphFormatError(str(exc), source[1], source[2]) from exc
    except GraphError as exc:
        raise GraphFormatError(str(exc), source[1], 1) from exc


def read_graph(path) -> Digraph | LazyDigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def format_graph(g) -> str:
    if isinstance(g, LazyDigraph):
        p, q = g.family[1:]
        return f"{HEADER} {VERSION}\nfamily ladder {p} {q}\n"
    out = [f"{HEADER} {VERSION}"]
    for e in g.sorted_edges():
        t, h = g.edges[e]
        out.append(f"edge {e} {t} {h}")
    out.append(f"source {g.source}")
    if g.sink is not None:
        out.append(f"sink {g.sink}")
    return "\n".join(out) + "\n"


def parse_counts(text: str) -> TransitionCounts:
    start = None
    counts: dict = {}
    last = 0
    for no, words in _lines(text):
        last = no
        kind = words[0][1]
        if kind == "start":
            _arity(no, words, 2)
            if start is not None:
                raise GraphFormatError("start given twice", no, words[0][0])
            start = parse_token(words[1][1])
        elif kind == "count":
            _arity(no, words, 4)
            u, v = parse_token(words[1][1]), parse_token(words[2][1])
            m = _nonneg_int(no, words[3][0], words[3][1], "count")
            if (u, v) in counts:
                raise GraphFormatError(f"pair ({u!r}, {v!r}) given twice", no, words[1][0])
            counts[(u, v)] = m
        else:
            raise GraphFormatError(f"unknown directive {kind!r}", no, words[0][0])
    if start is None:
        raise GraphFormatError("missing 'start' line", last + 1, 1)
    return TransitionCounts(start, counts)


def read_counts(path) -> TransitionCounts:
    with open(path, encoding="utf-8") as fh:
        return parse_counts(fh.read())


def format_counts(c: TransitionCounts) -> str:
    out = [f"start {c.start}"]
    for (u, v) in sorted(c.counts, key=lambda uv: (sort_key(uv[0]), sort_key(uv[1]))):
        out.append(f"count {u} {v} {c.counts[(u, v)]}")
    return "\n".join(out) + "\n"


def parse_sequence(text: str) -> tuple:
    seq = []
    for no, raw in enumerate(text.splitlines(), start=1):
        words = raw.split()
        if not words:
            continue
        if len(words) > 1:
            col = raw.index(words[1]) + 1
            raise GraphFormatError("one state token per line", no, col)
        seq.append(parse_token(words[0]))
    return tuple(seq)


def read_sequence(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        return parse_sequence(fh.read())
