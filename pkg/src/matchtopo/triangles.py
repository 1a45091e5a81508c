"""Double factorials, odd set partitions, and trees/forests of triangles."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from .errors import DomainError
from .graphs import Graph, edge_index

__all__ = [
    "double_factorial",
    "OddPartition",
    "odd_partitions",
    "count_odd_partition_weight",
    "trees_of_triangles",
    "forests_of_triangles",
    "count_trees_of_triangles",
    "is_tree_of_triangles",
    "is_forest_of_triangles",
]


def double_factorial(n: int) -> int:
    """Product of the odd ``j <= n``; ``(-1)!! = 1``."""
    if n < -1 or n % 2 == 0:
        raise DomainError(f"double factorial needs odd n >= -1, got {n}")
    out = 1
    for j in range(3, n + 1, 2):
        out *= j
    return out


@dataclass(frozen=True)
class OddPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if len(b) % 2 == 0:
                raise DomainError(f"block {b} has even size")
            if seen & set(b):
                raise DomainError("blocks overlap")
            seen |= set(b)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def ground(self) -> frozenset:
        return frozenset(x for b in self.blocks for x in b)

    def weight(self) -> int:
        """``prod (|block| - 2)!!`` squared."""
        out = 1
        for size in self.sizes:
            out *= double_factorial(size - 2) ** 2
        return out


def odd_partitions(ground: Iterable[int], parts: int) -> list[OddPartition]:
    """All unordered partitions of ``ground`` into ``parts`` odd blocks.

    Blocks are listed by increasing least element; each partition appears
    once. Incompatible parity gives an empty list.
    """
    elems = tuple(sorted(ground))
    if parts < 1:
        raise DomainError("need at least one block")
    if (len(elems) - parts) % 2:
        return []

    def rec(rest: tuple[int, ...], k: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if not rest:
            if k == 0:
                yield ()
            return
        if k == 0 or len(rest) < k:
            return
        first, others = rest[0], rest[1:]
        for extra in range(0, len(others) + 1, 2):
            for mates in combinations(others, extra):
                block = (first,) + mates
                remaining = tuple(x for x in others if x not in mates)
                for tail in rec(remaining, k - 1):
                    yield (block,) + tail

    return [OddPartition(p) for p in rec(elems, parts)]


@lru_cache(maxsize=None)
def count_odd_partition_weight(size: int, parts: int) -> int:
    """Sum of ``OddPartition.weight`` over all partitions of a ``size``-set
    into ``parts`` odd blocks, by recursion on the block of the least
    element (no enumeration)."""
    if size == 0:
        return 1 if parts == 0 else 0
    if parts <= 0:
        return 0
    total = 0
    for j in range(1, size + 1, 2):
        total += comb(size - 1, j - 1) * double_factorial(j - 2) ** 2 * count_odd_partition_weight(size - j, parts - 1)
    return total


def count_trees_of_triangles(size: int) -> int:
    if size < 1 or size % 2 == 0:
        raise DomainError(f"trees of triangles need an odd vertex count, got {size}")
    return double_factorial(size - 2) ** 2


# ---------------------------------------------------------------------------
# generation


def _even_splits(rest: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """Ordered splits of ``rest`` into three parts of even size."""
    for i in range(0, len(rest) + 1, 2):
        for I in combinations(rest, i):
            left = tuple(x for x in rest if x not in I)
            for j in range(0, len(left) + 1, 2):
                for J in combinations(left, j):
                    L = tuple(x for x in left if x not in J)
                    yield I, J, L


@lru_cache(maxsize=None)
def tree_masks(V: tuple[int, ...], n: int) -> tuple[int, ...]:
    """Edge masks (inside ``K_n``) of all trees of triangles on ``V``."""
    if len(V) % 2 == 0:
        raise DomainError(f"trees of triangles need an odd vertex count, got {len(V)}")
    if len(V) == 1:
        return (0,)
    v1, v2 = V[0], V[1]
    out = []
    for apex in V[2:]:
        base = (1 << edge_index(v1, v2, n)) | (1 << edge_index(v1, apex, n)) | (1 << edge_index(v2, apex, n))
        rest = tuple(x for x in V[2:] if x != apex)
        for I, J, L in _even_splits(rest):
            for t1 in tree_masks(tuple(sorted((v1,) + I)), n):
                for t2 in tree_masks(tuple(sorted((v2,) + J)), n):
                    for t3 in tree_masks(tuple(sorted((apex,) + L)), n):
                        out.append(base | t1 | t2 | t3)
    return tuple(out)


def trees_of_triangles(V: Iterable[int], n: int | None = None) -> Iterator[Graph]:
    """Each tree of triangles on ``V`` once, as a graph with vertex set ``V``
    inside ``K_n`` (``n`` defaults to ``max(V)``)."""
    V = tuple(sorted(V))
    if len(V) % 2 == 0:
        raise DomainError(f"trees of triangles need an odd vertex count, got {len(V)}")
    n = max(V) if n is None else n
    for mask in tree_masks(V, n):
        yield Graph(n, mask, frozenset(V))


def forest_masks(blocks: Iterable[Iterable[int]], n: int) -> list[int]:
    out = [0]
    for block in blocks:
        trees = tree_masks(tuple(sorted(block)), n)
        out = [f | t for f in out for t in trees]
    return out


def forests_of_triangles(partition: OddPartition | Iterable[Iterable[int]], n: int | None = None) -> Iterator[Graph]:
    """Forests whose components are exactly trees of triangles on the blocks."""
    blocks = partition.blocks if isinstance(partition, OddPartition) else tuple(tuple(b) for b in partition)
    V = frozenset(x for b in blocks for x in b)
    n = max(V) if n is None else n
    for mask in forest_masks(blocks, n):
        yield Graph(n, mask, V)


# ---------------------------------------------------------------------------
# recognition


def is_tree_of_triangles(g: Graph) -> bool:
    V = sorted(g.vertices)
    if len(V) == 1:
        return True
    if len(V) % 2 == 0 or len(g.components()) != 1:
        return False
    v1, v2 = V[0], V[1]
    if not g.has_edge(v1, v2):
        return False
    apexes = [m for m in V[2:] if g.has_edge(v1, m) and g.has_edge(v2, m)]
    if len(apexes) != 1:
        return False
    apex = apexes[0]
    h = g.remove_edge(v1, v2).remove_edge(v1, apex).remove_edge(v2, apex)
    comps = h.components()
    return len(comps) == 3 and all(is_tree_of_triangles(h.induced(c)) for c in comps)


def is_forest_of_triangles(g: Graph) -> bool:
    return all(is_tree_of_triangles(g.induced(c)) for c in g.components())
