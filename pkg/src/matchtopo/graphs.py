"""Labelled simple graphs as edge bitsets, maximum matchings and the
Gallai-Edmonds decomposition.

Vertices are 1-based. A general graph lives inside ``K_n`` and its edge set
is a Python int whose bit ``edge_index(u, v, n)`` is set when ``uv`` is an
edge. A bipartite graph lives inside ``K_{r,s}`` with left part ``1..r`` and
right part ``1bar..sbar``; the bit of ``(u, vbar)`` is ``(u-1)*s + (v-1)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import DomainError

__all__ = [
    "Graph",
    "BipartiteGraph",
    "Matching",
    "GallaiEdmonds",
    "edge_index",
    "edge_pair",
    "bipartite_edge_index",
    "bipartite_edge_pair",
    "max_matching",
    "max_matching_bipartite",
    "min_vertex_cover_bipartite",
    "matching_number",
    "is_factor_critical",
    "is_q_factor_critical",
    "gallai_edmonds",
]


# ---------------------------------------------------------------------------
# canonical edge order


def edge_index(u: int, v: int, n: int) -> int:
    """Lexicographic index of the pair ``{u, v}``, ``u < v``, among the
    ``n(n-1)/2`` pairs of ``[n]``."""
    if not (1 <= u < v <= n):
        raise DomainError(f"need 1 <= u < v <= n, got u={u}, v={v}, n={n}")
    return (u - 1) * (2 * n - u) // 2 + (v - u - 1)


@lru_cache(maxsize=None)
def edge_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1))


def edge_pair(index: int, n: int) -> tuple[int, int]:
    pairs = edge_pairs(n)
    if not 0 <= index < len(pairs):
        raise DomainError(f"edge index {index} out of range for n={n}")
    return pairs[index]


def bipartite_edge_index(u: int, v: int, r: int, s: int) -> int:
    if not (1 <= u <= r and 1 <= v <= s):
        raise DomainError(f"need 1 <= u <= {r} and 1 <= v <= {s}, got ({u}, {v})")
    return (u - 1) * s + (v - 1)


def bipartite_edge_pair(index: int, r: int, s: int) -> tuple[int, int]:
    if not 0 <= index < r * s:
        raise DomainError(f"edge index {index} out of range for r={r}, s={s}")
    return index // s + 1, index % s + 1


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ---------------------------------------------------------------------------
# graph types


@dataclass(frozen=True)
class Graph:
    """A simple graph on a vertex set ``V`` contained in ``[n]``.

    ``vertices`` defaults to all of ``[n]``; it only shrinks through
    ``delete_vertex`` and ``induced`` (``G - v`` and ``G|_X``).
    """

    n: int
    edges: int = 0
    vertices: frozenset = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("vertex count must be nonnegative")
        if self.vertices is None:
            object.__setattr__(self, "vertices", frozenset(range(1, self.n + 1)))
        else:
            object.__setattr__(self, "vertices", frozenset(self.vertices))
            if any(not 1 <= v <= self.n for v in self.vertices):
                raise DomainError("vertex label outside [n]")
        total = self.n * (self.n - 1) // 2
        if self.edges < 0 or self.edges >> total:
            raise DomainError("edge bitset has bits beyond C(n,2)")
        pairs = edge_pairs(self.n)
        for i in _bits(self.edges):
            u, v = pairs[i]
            if u not in self.vertices or v not in self.vertices:
                raise DomainError(f"edge {u}{v} leaves the vertex set")

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]], vertices=None) -> "Graph":
        mask = 0
        for u, v in pairs:
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            u, v = min(u, v), max(u, v)
            mask |= 1 << edge_index(u, v, n)
        return cls(n, mask, vertices)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, (1 << (n * (n - 1) // 2)) - 1)

    def edge_list(self) -> list[tuple[int, int]]:
        pairs = edge_pairs(self.n)
        return [pairs[i] for i in _bits(self.edges)]

    @property
    def num_edges(self) -> int:
        return bin(self.edges).count("1")

    def has_edge(self, u: int, v: int) -> bool:
        u, v = min(u, v), max(u, v)
        return bool(self.edges >> edge_index(u, v, self.n) & 1)

    def neighbors(self, v: int) -> set[int]:
        return {b if a == v else a for a, b in self.edge_list() if v in (a, b)}

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in sorted(self.vertices)}
        for a, b in self.edge_list():
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def add_edge(self, u: int, v: int) -> "Graph":
        u, v = min(u, v), max(u, v)
        return Graph(self.n, self.edges | 1 << edge_index(u, v, self.n), self.vertices)

    def remove_edge(self, u: int, v: int) -> "Graph":
        u, v = min(u, v), max(u, v)
        return Graph(self.n, self.edges & ~(1 << edge_index(u, v, self.n)), self.vertices)

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = frozenset(keep)
        if not keep <= self.vertices:
            raise DomainError("induced subgraph on vertices outside V(G)")
        mask = 0
        for i, (a, b) in enumerate(edge_pairs(self.n)):
            if self.edges >> i & 1 and a in keep and b in keep:
                mask |= 1 << i
        return Graph(self.n, mask, keep)

    def delete_vertex(self, v: int) -> "Graph":
        return self.induced(self.vertices - {v})

    def components(self) -> list[frozenset]:
        adj = self.adjacency()
        seen: set[int] = set()
        out = []
        for root in sorted(self.vertices):
            if root in seen:
                continue
            comp = {root}
            stack = [root]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph on ``[r]`` and ``[sbar]``; right vertex ``vbar`` is
    written ``v`` wherever the side is clear from context."""

    r: int
    s: int
    edges: int = 0

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise DomainError("part sizes must be nonnegative")
        if self.edges < 0 or self.edges >> (self.r * self.s):
            raise DomainError("edge bitset has bits beyond r*s")

    @classmethod
    def from_edges(cls, r: int, s: int, pairs: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        mask = 0
        for u, v in pairs:
            mask |= 1 << bipartite_edge_index(u, v, r, s)
        return cls(r, s, mask)

    @classmethod
    def complete(cls, r: int, s: int) -> "BipartiteGraph":
        return cls(r, s, (1 << (r * s)) - 1)

    def edge_list(self) -> list[tuple[int, int]]:
        return [bipartite_edge_pair(i, self.r, self.s) for i in _bits(self.edges)]

    @property
    def num_edges(self) -> int:
        return bin(self.edges).count("1")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.edges >> bipartite_edge_index(u, v, self.r, self.s) & 1)

    def delete_right(self, v: int) -> "BipartiteGraph":
        """Remove all edges at ``vbar``; the vertex itself stays (it is then
        isolated, which does not change any matching number)."""
        mask = self.edges
        for u in range(1, self.r + 1):
            mask &= ~(1 << bipartite_edge_index(u, v, self.r, self.s))
        return BipartiteGraph(self.r, self.s, mask)

    def as_graph(self) -> Graph:
        """The same graph on ``[r+s]``, with ``vbar`` relabelled ``r+v``."""
        return Graph.from_edges(self.r + self.s, ((u, self.r + v) for u, v in self.edge_list()))


@dataclass(frozen=True)
class Matching:
    edges: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def covered(self) -> set:
        return {x for e in self.edges for x in e}


@dataclass(frozen=True)
class GallaiEdmonds:
    D: frozenset
    A: frozenset
    C: frozenset
    nu: int
    components_of_D: tuple[frozenset, ...]

    @property
    def con(self) -> int:
        return len(self.components_of_D)


# ---------------------------------------------------------------------------
# matchings


def _blossom(vertices: list[int], adj: dict[int, list[int]]) -> dict[int, int | None]:
    """Edmonds' cardinality matching with blossom contraction (BFS form)."""
    match: dict[int, int | None] = {v: None for v in vertices}

    # greedy start
    for v in vertices:
        if match[v] is None:
            for w in adj[v]:
                if match[w] is None:
                    match[v], match[w] = w, v
                    break

    def lca(a, b, base, parent):
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] is None:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[match[b]]

    def mark_path(v, b, child, base, parent, in_blossom):
        while base[v] != b:
            in_blossom.add(base[v])
            in_blossom.add(base[match[v]])
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def find_path(root):
        used = {root}
        parent: dict[int, int | None] = {v: None for v in vertices}
        base = {v: v for v in vertices}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] is not None and parent[match[to]] is not None):
                    cur = lca(v, to, base, parent)
                    in_blossom: set[int] = set()
                    mark_path(v, cur, to, base, parent, in_blossom)
                    mark_path(to, cur, v, base, parent, in_blossom)
                    for x in vertices:
                        if base[x] in in_blossom:
                            base[x] = cur
                            if x not in used:
                                used.add(x)
                                queue.append(x)
                elif parent[to] is None:
                    parent[to] = v
                    if match[to] is None:
                        return to, parent
                    used.add(match[to])
                    queue.append(match[to])
        return None, parent

    for root in vertices:
        if match[root] is not None:
            continue
        end, parent = find_path(root)
        while end is not None:
            pv = parent[end]
            nxt = match[pv]
            match[end], match[pv] = pv, end
            end = nxt
    return match


def max_matching(g: Graph) -> Matching:
    """A maximum matching of ``g``."""
    vertices = sorted(g.vertices)
    match = _blossom(vertices, g.adjacency())
    pairs = sorted((v, w) for v, w in match.items() if w is not None and v < w)
    return Matching(tuple(pairs))


def matching_number(g: Graph | BipartiteGraph) -> int:
    if isinstance(g, BipartiteGraph):
        return max_matching_bipartite(g).size
    return max_matching(g).size


def _kuhn(b: BipartiteGraph) -> dict[int, int]:
    """Augmenting-path bipartite matching; returns right -> left."""
    adj: dict[int, list[int]] = {u: [] for u in range(1, b.r + 1)}
    for u, v in b.edge_list():
        adj[u].append(v)
    owner: dict[int, int] = {}

    def augment(u, seen):
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = u
                return True
        return False

    for u in range(1, b.r + 1):
        augment(u, set())
    return owner


def max_matching_bipartite(b: BipartiteGraph) -> Matching:
    owner = _kuhn(b)
    return Matching(tuple(sorted((u, v) for v, u in owner.items())))


def min_vertex_cover_bipartite(b: BipartiteGraph) -> dict[str, frozenset]:
    """Minimum vertex cover by Koenig's construction.

    Returns ``{"left": ..., "right": ...}``; its total size equals the
    maximum matching size.
    """
    owner = _kuhn(b)
    mate_left = {u: v for v, u in owner.items()}
    adj: dict[int, list[int]] = {u: [] for u in range(1, b.r + 1)}
    for u, v in b.edge_list():
        adj[u].append(v)
    # alternating reachability from unmatched left vertices
    z_left = {u for u in range(1, b.r + 1) if u not in mate_left}
    z_right: set[int] = set()
    queue = deque(z_left)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in z_right or mate_left.get(u) == v:
                continue
            z_right.add(v)
            w = owner.get(v)
            if w is not None and w not in z_left:
                z_left.add(w)
                queue.append(w)
    left = frozenset(range(1, b.r + 1)) - z_left
    return {"left": left, "right": frozenset(z_right)}


# ---------------------------------------------------------------------------
# factor criticality and Gallai-Edmonds


def is_factor_critical(g: Graph) -> bool:
    size = len(g.vertices)
    if size % 2 == 0:
        return False
    half = (size - 1) // 2
    return all(matching_number(g.delete_vertex(v)) == half for v in g.vertices)


def is_q_factor_critical(b: BipartiteGraph, q: int) -> bool:
    if b.r != q:
        raise DomainError(f"left part has {b.r} vertices, expected q={q}")
    if b.s <= q:
        return False
    return all(max_matching_bipartite(b.delete_right(y)).size == q for y in range(1, b.s + 1))


def gallai_edmonds(g: Graph) -> GallaiEdmonds:
    """Gallai-Edmonds partition with ``D`` read off as the vertices whose
    deletion leaves the matching number unchanged."""
    nu = matching_number(g)
    D = frozenset(v for v in g.vertices if matching_number(g.delete_vertex(v)) == nu)
    adj = g.adjacency()
    A = frozenset(v for v in g.vertices - D if any(w in D for w in adj[v]))
    C = g.vertices - D - A
    comps = tuple(g.induced(D).components()) if D else ()
    return GallaiEdmonds(D=D, A=A, C=C, nu=nu, components_of_D=comps)
