"""Plain-text graph format.

General graph: first line ``n``, then one ``u v`` per edge.
Bipartite graph: first line ``r s``, then ``u v`` meaning ``u`` in ``[r]``
and ``v`` in the right part ``[s]``. Blank lines and ``#`` comments are
ignored. Labels are 1-based.
"""
from __future__ import annotations

from .errors import ParseError
from .graphs import BipartiteGraph, Graph, bipartite_edge_index, edge_index


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(no: int, line: str, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"expected {count} integers, got {line!r}", no)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"not an integer in {line!r}", no) from None


def parse_graph(text: str) -> Graph:
    lines = _lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty input", 1) from None
    (n,) = _ints(no, head, 1)
    if n < 0:
        raise ParseError("vertex count must be nonnegative", no)
    mask = 0
    for no, line in lines:
        u, v = _ints(no, line, 2)
        if u == v:
            raise ParseError(f"loop at vertex {u}", no)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"label out of range 1..{n}", no)
        bit = 1 << edge_index(min(u, v), max(u, v), n)
        if mask & bit:
            raise ParseError(f"duplicate edge {u} {v}", no)
        mask |= bit
    return Graph(n, mask)


def parse_bipartite(text: str) -> BipartiteGraph:
    lines = _lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty input", 1) from None
    r, s = _ints(no, head, 2)
    if r < 0 or s < 0:
        raise ParseError("part sizes must be nonnegative", no)
    mask = 0
    for no, line in lines:
        u, v = _ints(no, line, 2)
        if not (1 <= u <= r and 1 <= v <= s):
            raise ParseError(f"label out of range (1..{r}, 1..{s})", no)
        bit = 1 << bipartite_edge_index(u, v, r, s)
        if mask & bit:
            raise ParseError(f"duplicate edge {u} {v}", no)
        mask |= bit
    return BipartiteGraph(r, s, mask)


def format_graph(g: Graph) -> str:
    return "".join([f"{g.n}\n"] + [f"{u} {v}\n" for u, v in g.edge_list()])


def format_bipartite(b: BipartiteGraph) -> str:
    return "".join([f"{b.r} {b.s}\n"] + [f"{u} {v}\n" for u, v in b.edge_list()])
