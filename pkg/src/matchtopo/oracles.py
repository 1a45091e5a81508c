"""Brute-force reference computations used to cross-check the fast paths."""
from __future__ import annotations

from .graphs import Graph


def all_matchings(g: Graph) -> list[frozenset]:
    """Every matching of ``g`` (as sets of ``(u, v)`` pairs), empty one included."""
    edges = g.edge_list()
    out = []

    def rec(i, used, chosen):
        if i == len(edges):
            out.append(frozenset(chosen))
            return
        rec(i + 1, used, chosen)
        u, v = edges[i]
        if u not in used and v not in used:
            chosen.append((u, v))
            rec(i + 1, used | {u, v}, chosen)
            chosen.pop()

    rec(0, frozenset(), [])
    return out


def brute_gallai_edmonds(g: Graph) -> dict:
    """Partition read straight from the definitions: ``D`` is the set of
    vertices missed by some maximum matching."""
    ms = all_matchings(g)
    nu = max(len(m) for m in ms)
    D = set()
    for m in ms:
        if len(m) == nu:
            covered = {x for e in m for x in e}
            D |= set(g.vertices) - covered
    A = {v for v in g.vertices if v not in D and g.neighbors(v) & D}
    C = set(g.vertices) - D - A
    comps = g.induced(D).components() if D else []
    return {"nu": nu, "D": frozenset(D), "A": frozenset(A), "C": frozenset(C), "con": len(comps)}
