"""Mask-level machinery over a fixed ground set of edges.

A face of any complex in this package is an int whose bits index the edges
of the ambient complete (or complete bipartite) graph. ``Ground`` fixes that
indexing together with internal vertex ids: ``1..n`` for ``K_n``; ``1..r``
for the left part and ``r+1..r+s`` for the right part of ``K_{r,s}``.

Matching numbers of all ``2^E`` edge subsets are tabulated once by the
recurrence ``nu(m) = max(nu(m - e), 1 + nu(m & disjoint(e)))`` on the top
edge ``e`` of ``m``, which is what makes exhaustive work over ``2^21`` faces
affordable.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ResourceError
from .graphs import BipartiteGraph, Graph, edge_pairs

MAX_EDGES = 24


@dataclass(frozen=True)
class Ground:
    kind: str  # "graph" or "bipartite"
    n: int = 0
    r: int = 0
    s: int = 0

    @cached_property
    def endpoints(self) -> tuple[tuple[int, int], ...]:
        if self.kind == "graph":
            return edge_pairs(self.n)
        return tuple((u, self.r + v) for u in range(1, self.r + 1) for v in range(1, self.s + 1))

    @property
    def num_edges(self) -> int:
        return len(self.endpoints)

    @property
    def num_vertices(self) -> int:
        return self.n if self.kind == "graph" else self.r + self.s

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(range(1, self.num_vertices + 1))

    @cached_property
    def incident(self) -> tuple[int, ...]:
        inc = [0] * (self.num_vertices + 1)
        for i, (a, b) in enumerate(self.endpoints):
            inc[a] |= 1 << i
            inc[b] |= 1 << i
        return tuple(inc)

    @cached_property
    def star(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``star[v]`` lists ``(edge_bit, other_endpoint)`` at ``v``."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.num_vertices + 1)]
        for i, (a, b) in enumerate(self.endpoints):
            out[a].append((1 << i, b))
            out[b].append((1 << i, a))
        return tuple(tuple(x) for x in out)

    def bit(self, a: int, b: int) -> int:
        """Edge bit for internal vertex ids ``a, b`` (either order)."""
        return 1 << self.edge_id(a, b)

    def edge_id(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        if self.kind == "graph":
            return (a - 1) * (2 * self.n - a) // 2 + (b - a - 1)
        return (a - 1) * self.s + (b - self.r - 1)

    def label(self, v: int) -> str:
        if self.kind == "bipartite" and v > self.r:
            return f"{v - self.r}bar"
        return str(v)

    def to_object(self, mask: int):
        if self.kind == "graph":
            return Graph(self.n, int(mask))
        return BipartiteGraph(self.r, self.s, int(mask))

    def describe(self) -> dict:
        if self.kind == "graph":
            return {"graph": "K_n", "n": self.n}
        return {"graph": "K_rs", "r": self.r, "s": self.s}


@lru_cache(maxsize=None)
def complete_ground(n: int) -> Ground:
    return Ground("graph", n=n)


@lru_cache(maxsize=None)
def bipartite_ground(r: int, s: int) -> Ground:
    return Ground("bipartite", r=r, s=s)


def ground_of(obj) -> Ground:
    if isinstance(obj, BipartiteGraph):
        return bipartite_ground(obj.r, obj.s)
    return complete_ground(obj.n)


def check_edges(ground: Ground, max_edges: int = MAX_EDGES) -> None:
    if ground.num_edges > max_edges:
        raise ResourceError(
            f"ground set has {ground.num_edges} edges; cap is {max_edges}"
        )


@lru_cache(maxsize=8)
def nu_table(ground: Ground) -> np.ndarray:
    """Matching number of every edge subset, indexed by mask (uint8)."""
    check_edges(ground)
    E = ground.num_edges
    table = np.zeros(1 << E, dtype=np.uint8)
    ends = ground.endpoints
    for i in range(E):
        a, b = ends[i]
        disjoint = 0
        for j in range(i):
            if a not in ends[j] and b not in ends[j]:
                disjoint |= 1 << j
        low = np.arange(1 << i, dtype=np.int64)
        table[1 << i: 1 << (i + 1)] = np.maximum(table[: 1 << i], table[low & disjoint] + 1)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=8)
def nu_bytes(ground: Ground) -> bytes:
    """The ``nu_table`` as bytes; scalar indexing on bytes is much cheaper."""
    return nu_table(ground).tobytes()


def all_masks(ground: Ground) -> np.ndarray:
    return np.arange(1 << ground.num_edges, dtype=np.int64)


def popcount(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr).astype(np.int64)


@lru_cache(maxsize=8)
def factor_critical_array(ground: Ground) -> np.ndarray:
    """Boolean array: is the mask a factor-critical graph on all of ``[n]``."""
    assert ground.kind == "graph"
    n = ground.n
    size = 1 << ground.num_edges
    if n % 2 == 0:
        out = np.zeros(size, dtype=bool)
    else:
        table = nu_table(ground)
        masks = all_masks(ground)
        half = (n - 1) // 2
        out = np.ones(size, dtype=bool)
        for v in ground.vertices:
            out &= table[masks & ~ground.incident[v]] == half
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def q_factor_critical_array(ground: Ground) -> np.ndarray:
    """Boolean array: is the mask ``q``-factor critical, ``q = r``."""
    assert ground.kind == "bipartite"
    q, s = ground.r, ground.s
    size = 1 << ground.num_edges
    if s <= q:
        out = np.zeros(size, dtype=bool)
    else:
        table = nu_table(ground)
        masks = all_masks(ground)
        out = np.ones(size, dtype=bool)
        for y in range(q + 1, q + s + 1):
            out &= table[masks & ~ground.incident[y]] == q
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# scalar helpers used by the Morse builders


def vertex_mask(vs) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


def vertices_of(vmask: int) -> list[int]:
    out = []
    while vmask:
        low = vmask & -vmask
        out.append(low.bit_length() - 1)
        vmask ^= low
    return out


@dataclass(frozen=True)
class MaskGE:
    nu: int
    D: int  # vertex bitmasks over internal ids
    A: int
    C: int
    components: tuple[int, ...]  # vertex bitmasks of the components of G|_D

    def component_of(self, v: int) -> int:
        for comp in self.components:
            if comp >> v & 1:
                return comp
        return 0


def gallai_edmonds_mask(ground: Ground, mask: int) -> MaskGE:
    nub = nu_bytes(ground)
    inc = ground.incident
    star = ground.star
    nu = nub[mask]
    D = 0
    for v in ground.vertices:
        if nub[mask & ~inc[v]] == nu:
            D |= 1 << v
    A = 0
    for v in ground.vertices:
        if D >> v & 1:
            continue
        for bit, w in star[v]:
            if mask & bit and D >> w & 1:
                A |= 1 << v
                break
    full = vertex_mask(ground.vertices)
    C = full & ~D & ~A
    comps = []
    left = D
    while left:
        low = left & -left
        root = low.bit_length() - 1
        comp = low
        stack = [root]
        while stack:
            x = stack.pop()
            for bit, w in star[x]:
                if mask & bit and D >> w & 1 and not comp >> w & 1:
                    comp |= 1 << w
                    stack.append(w)
        comps.append(comp)
        left &= ~comp
    return MaskGE(nu=nu, D=D, A=A, C=C, components=tuple(comps))


def neighbors_mask(ground: Ground, mask: int, v: int) -> int:
    out = 0
    for bit, w in ground.star[v]:
        if mask & bit:
            out |= 1 << w
    return out


def restrict_edges(ground: Ground, vmask: int) -> int:
    """Edge mask of all ground edges with both ends in ``vmask``."""
    out = 0
    for i, (a, b) in enumerate(ground.endpoints):
        if vmask >> a & 1 and vmask >> b & 1:
            out |= 1 << i
    return out
