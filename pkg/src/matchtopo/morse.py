"""Face posets, Morse matchings and their certification.

Faces are edge masks. Arcs of the Hasse digraph point from a face to each
of its codimension-one faces; a Morse matching reverses some of them. A
matching is certified acyclic by searching only alternating walks
(matched arc up, unmatched arc down). In the face poset of a simplicial
complex every directed cycle of the modified digraph has this shape. The
walks are encoded as a digraph on the matched pairs and its strongly
connected components are computed with scipy.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import ground as gr
from .errors import ClaimViolation, PreconditionError, StructureError
from .families import DEFAULT_FACE_CAP, FamilySpec, canonical_order, face_masks

__all__ = [
    "FacePoset",
    "MorseMatching",
    "CycleWitness",
    "VerificationReport",
    "face_poset",
    "simplex_poset",
    "verify",
    "cluster_compose",
    "critical_census",
]


def _lookup(sorted_arr: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Positions of ``query`` in ``sorted_arr``; -1 where absent."""
    query = np.asarray(query, dtype=np.int64)
    if len(sorted_arr) == 0:
        return np.full(query.shape, -1, dtype=np.int64)
    pos = np.searchsorted(sorted_arr, query)
    pos = np.minimum(pos, len(sorted_arr) - 1)
    return np.where(sorted_arr[pos] == query, pos, -1)


@dataclass(frozen=True)
class FacePoset:
    """Faces of a complex (or cells of a quotient) under inclusion.

    For a quotient ``Sigma/Gamma`` only the cells outside ``Gamma`` are
    present; incidences into ``Gamma`` are dropped (they go to the base
    point).
    """

    ground: gr.Ground
    faces: np.ndarray  # ascending by mask value
    quotient: bool = False
    label: str = ""

    @classmethod
    def from_masks(cls, ground, masks, quotient=False, label="") -> "FacePoset":
        arr = np.unique(np.asarray(masks, dtype=np.int64))
        return cls(ground, arr, quotient, label)

    def __len__(self) -> int:
        return len(self.faces)

    def index(self, masks) -> np.ndarray:
        return _lookup(self.faces, masks)

    def contains(self, masks) -> np.ndarray:
        return self.index(masks) >= 0

    def __contains__(self, mask: int) -> bool:
        return bool(self.contains(np.array([mask]))[0])

    def subfaces(self, mask: int) -> list[int]:
        """Codimension-one faces of ``mask`` that belong to the poset."""
        out = []
        rest = int(mask)
        while rest:
            low = rest & -rest
            rest ^= low
            if (mask ^ low) in self:
                out.append(int(mask ^ low))
        return out

    def canonical_faces(self) -> np.ndarray:
        return canonical_order(self.faces)

    def dimension_counts(self) -> dict[int, int]:
        dims = gr.popcount(self.faces) - 1
        vals, counts = np.unique(dims, return_counts=True)
        return {int(d): int(c) for d, c in zip(vals, counts)}


def face_poset(spec: FamilySpec, face_cap: int = DEFAULT_FACE_CAP) -> FacePoset:
    return FacePoset.from_masks(spec.ground, face_masks(spec, face_cap), spec.is_quotient, spec.label)


def simplex_poset(ground: gr.Ground) -> FacePoset:
    """All ``2^E`` faces of the full simplex on the ground edges."""
    gr.check_edges(ground)
    label = f"Sigma({ground.n})" if ground.kind == "graph" else f"Sigma({ground.r},{ground.s})"
    return FacePoset(ground, gr.all_masks(ground), False, label)


@dataclass(frozen=True)
class MorseMatching:
    """Pairs ``(upper, lower)`` with ``lower = upper - one edge``.

    ``blocks`` records the cluster decomposition a builder used, as
    ``(faces, matching)`` tuples; ``meta`` carries builder bookkeeping.
    """

    ground: gr.Ground
    upper: np.ndarray
    lower: np.ndarray
    blocks: tuple = field(default=(), compare=False, repr=False)
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_pairs(cls, ground, pairs, **kw) -> "MorseMatching":
        pairs = list(pairs)
        up = np.array([p[0] for p in pairs], dtype=np.int64)
        lo = np.array([p[1] for p in pairs], dtype=np.int64)
        order = np.argsort(lo, kind="stable")
        return cls(ground, up[order], lo[order], **kw)

    @classmethod
    def empty(cls, ground) -> "MorseMatching":
        return cls(ground, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.upper)

    def pairs(self):
        for u, l in zip(self.upper.tolist(), self.lower.tolist()):
            yield u, l

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs())

    def matched(self) -> np.ndarray:
        return np.concatenate([self.upper, self.lower])

    def partner_map(self) -> dict[int, int]:
        out = {}
        for u, l in self.pairs():
            out[u] = l
            out[l] = u
        return out

    def to_json(self) -> dict:
        return {
            "ground": self.ground.describe(),
            "pairs": [[u, l] for u, l in sorted(self.pairs(), key=lambda p: p[1])],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MorseMatching":
        g = data["ground"]
        ground = gr.complete_ground(g["n"]) if g["graph"] == "K_n" else gr.bipartite_ground(g["r"], g["s"])
        return cls.from_pairs(ground, [tuple(p) for p in data["pairs"]])


def union(ground, matchings) -> MorseMatching:
    matchings = list(matchings)
    if not matchings:
        return MorseMatching.empty(ground)
    up = np.concatenate([m.upper for m in matchings])
    lo = np.concatenate([m.lower for m in matchings])
    order = np.argsort(lo, kind="stable")
    return MorseMatching(ground, up[order], lo[order])


@dataclass(frozen=True)
class CycleWitness:
    """``faces = [s1, t1, s2, t2, ..., s_r = s1]`` with ``t_i = s_i + x_i``
    matched to ``s_i`` and ``s_{i+1} = t_i - y_i``."""

    faces: tuple[int, ...]
    added: tuple[int, ...]  # x_i as edge indices
    removed: tuple[int, ...]  # y_i as edge indices
    alternating: bool = True

    @property
    def r(self) -> int:
        return (len(self.faces) + 1) // 2

    def check_shape(self, matching: MorseMatching | None = None) -> bool:
        f = self.faces
        if not self.alternating:
            return False
        if len(f) < 5 or len(f) % 2 == 0 or f[0] != f[-1]:
            return False
        pairs = matching.as_dict() if matching is not None else None
        for i in range(0, len(f) - 1, 2):
            s, t, s_next = f[i], f[i + 1], f[i + 2]
            x, y = self.added[i // 2], self.removed[i // 2]
            if t != s | 1 << x or s & 1 << x:
                return False
            if s_next != t & ~(1 << y) or not t >> y & 1:
                return False
            if pairs is not None and pairs.get(t) != s:
                return False
        return Counter(self.added) == Counter(self.removed)


@dataclass(frozen=True)
class VerificationReport:
    is_matching: bool
    is_acyclic: bool
    cycle_witness: CycleWitness | None
    critical: np.ndarray  # canonical order
    census: dict[int, int]

    @property
    def valid(self) -> bool:
        return self.is_matching and self.is_acyclic

    def summary(self) -> dict:
        return {
            "is_matching": self.is_matching,
            "is_acyclic": self.is_acyclic,
            "critical_cells": int(len(self.critical)),
            "census": {str(d): c for d, c in sorted(self.census.items())},
            "cycle_witness": None if self.cycle_witness is None else list(self.cycle_witness.faces),
        }


def _check_structure(matching: MorseMatching, poset: FacePoset) -> None:
    up, lo = matching.upper, matching.lower
    diff = up ^ lo
    bad = (gr.popcount(diff) != 1) | ((lo & ~up) != 0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise StructureError(f"pair ({int(up[i])}, {int(lo[i])}) is not a codimension-one incidence")
    missing = ~(poset.contains(up) & poset.contains(lo))
    if missing.any():
        i = int(np.flatnonzero(missing)[0])
        raise StructureError(f"pair ({int(up[i])}, {int(lo[i])}) leaves the poset {poset.label}")


def _census(masks: np.ndarray) -> dict[int, int]:
    if len(masks) == 0:
        return {}
    vals, counts = np.unique(gr.popcount(masks) - 1, return_counts=True)
    return {int(d): int(c) for d, c in zip(vals, counts)}


def _find_cycle(n_nodes: int, src: np.ndarray, dst: np.ndarray, members: np.ndarray) -> list[int]:
    """A directed cycle inside one strongly connected component."""
    inside = set(members.tolist())
    adj: dict[int, list[int]] = {v: [] for v in inside}
    for a, b in zip(src.tolist(), dst.tolist()):
        if a in inside and b in inside:
            adj[a].append(b)
    start = min(inside)
    prev = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w == start:
                path = [v]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.reverse()
                return path
            if w not in prev:
                prev[w] = v
                queue.append(w)
    raise AssertionError("strong component without a cycle")


def _nontrivial_component(n_nodes, src, dst):
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n_nodes, n_nodes))
    ncomp, labels = connected_components(graph, directed=True, connection="strong")
    if ncomp == n_nodes:
        return None
    counts = np.bincount(labels)
    big = int(np.flatnonzero(counts > 1)[0])
    return np.flatnonzero(labels == big)


def _pair_digraph(matching: MorseMatching, E: int):
    """Arcs between matched pairs: pair ``(t, s)`` -> pair ``(t', s')`` when
    ``s' = t - y`` for an edge ``y`` of ``t`` other than the matched one."""
    up, lo = matching.upper, matching.lower
    order = np.argsort(lo)
    lo_sorted = lo[order]
    srcs, dsts = [], []
    matched_bit = up ^ lo
    for y in range(E):
        b = np.int64(1 << y)
        sel = np.flatnonzero(((up & b) != 0) & (matched_bit != b))
        if len(sel) == 0:
            continue
        pos = _lookup(lo_sorted, up[sel] & ~b)
        ok = pos >= 0
        srcs.append(sel[ok])
        dsts.append(order[pos[ok]])
    if srcs:
        return np.concatenate(srcs), np.concatenate(dsts)
    empty = np.zeros(0, dtype=np.int64)
    return empty, empty


def _general_cycle(matching: MorseMatching, poset: FacePoset):
    """Cycle search on the full modified Hasse digraph (used when M1 fails)."""
    faces = poset.faces
    E = poset.ground.num_edges
    matched = set(matching.pairs())
    srcs, dsts = [], []
    for y in range(E):
        b = np.int64(1 << y)
        sel = np.flatnonzero((faces & b) != 0)
        pos = poset.index(faces[sel] & ~b)
        ok = pos >= 0
        srcs.append(sel[ok])
        dsts.append(pos[ok])
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    if matched:
        flip = np.array([(int(faces[a]), int(faces[b])) in matched for a, b in zip(src, dst)], dtype=bool)
        src, dst = np.where(flip, dst, src), np.where(flip, src, dst)
    comp = _nontrivial_component(len(faces), src, dst)
    if comp is None:
        return None
    cycle = _find_cycle(len(faces), src, dst, comp)
    seq = tuple(int(faces[i]) for i in cycle) + (int(faces[cycle[0]]),)
    return CycleWitness(seq, (), (), alternating=False)


def verify(matching: MorseMatching, poset: FacePoset) -> VerificationReport:
    """Check (M1) and acyclicity of ``matching`` on ``poset``."""
    _check_structure(matching, poset)
    ends = matching.matched()
    is_matching = len(np.unique(ends)) == len(ends)
    witness = None
    if is_matching:
        src, dst = _pair_digraph(matching, poset.ground.num_edges)
        comp = _nontrivial_component(len(matching), src, dst)
        if comp is not None:
            cycle = _find_cycle(len(matching), src, dst, comp)
            faces, added, removed = [], [], []
            for i, j in zip(cycle, cycle[1:] + cycle[:1]):
                s, t = int(matching.lower[i]), int(matching.upper[i])
                faces += [s, t]
                added.append((t ^ s).bit_length() - 1)
                removed.append((t ^ int(matching.lower[j])).bit_length() - 1)
            faces.append(faces[0])
            witness = CycleWitness(tuple(faces), tuple(added), tuple(removed))
    else:
        witness = _general_cycle(matching, poset)
    critical = poset.faces[~np.isin(poset.faces, ends)]
    critical = canonical_order(critical)
    return VerificationReport(is_matching, witness is None, witness, critical, _census(critical))


def critical_census(matching: MorseMatching, poset: FacePoset) -> dict[int, int]:
    """Unmatched faces per dimension (a face with m edges has dimension m-1)."""
    ends = matching.matched()
    return _census(poset.faces[~np.isin(poset.faces, ends)])


def cluster_compose(blocks, poset: FacePoset | None = None, check: bool = True) -> MorseMatching:
    """Union of per-block Morse matchings.

    ``blocks`` is a sequence of ``(faces, matching)``. The blocks must be
    pairwise disjoint, and the order they inherit (block ``P`` below block
    ``Q`` when some face of ``P`` lies under some face of ``Q``) must be
    acyclic; covers are read inside ``poset`` (default: the union of the
    blocks, which must then be order convex). Each block matching is
    verified on its own block, and with ``check`` the union is verified
    again on the whole poset.
    """
    blocks = [(np.unique(np.asarray(f, dtype=np.int64)), m) for f, m in blocks]
    if not blocks:
        raise PreconditionError("no blocks to compose")
    ground = blocks[0][1].ground
    faces = np.concatenate([f for f, _ in blocks])
    labels = np.concatenate([np.full(len(f), i, dtype=np.int64) for i, (f, _) in enumerate(blocks)])
    order = np.argsort(faces, kind="stable")
    faces, labels = faces[order], labels[order]
    if len(faces) > 1 and (np.diff(faces) == 0).any():
        raise PreconditionError("blocks are not pairwise disjoint")
    if poset is None:
        poset = FacePoset(ground, faces, label="union of blocks")
    elif len(poset.faces) != len(faces) or not np.array_equal(poset.faces, faces):
        raise PreconditionError("blocks do not partition the poset")

    for i, (f, m) in enumerate(blocks):
        rep = verify(m, FacePoset(ground, f, label=f"block {i}"))
        if not rep.valid:
            raise PreconditionError(f"block {i} matching is not an acyclic matching", witness=rep.cycle_witness)

    # block order from covering relations
    edges = set()
    for y in range(ground.num_edges):
        b = np.int64(1 << y)
        sel = np.flatnonzero((faces & b) == 0)
        pos = _lookup(faces, faces[sel] | b)
        ok = pos >= 0
        a, c = labels[sel[ok]], labels[pos[ok]]
        diff = a != c
        if diff.any():
            key = np.unique(a[diff] * len(blocks) + c[diff])
            edges.update((int(x) // len(blocks), int(x) % len(blocks)) for x in key)
    cycle = _block_cycle(len(blocks), edges)
    if cycle is not None:
        raise PreconditionError(f"block order has a cycle through blocks {cycle}", witness=cycle)

    composed = union(ground, [m for _, m in blocks])
    composed = MorseMatching(ground, composed.upper, composed.lower, blocks=tuple(blocks))
    if check:
        rep = verify(composed, poset)
        if not rep.valid:
            raise ClaimViolation("composed matching failed verification")
    return composed


def _block_cycle(n: int, edges) -> list[int] | None:
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in sorted(edges):
        adj[a].append(b)
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(adj[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(adj[w])))
                    break
                if color[w] == 1:
                    cyc = [v]
                    while cyc[-1] != w:
                        cyc.append(parent[cyc[-1]])
                    return cyc[::-1]
            else:
                color[v] = 2
                stack.pop()
    return None
