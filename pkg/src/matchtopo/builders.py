"""Explicit acyclic matchings whose critical cells are counted in closed form.

Each builder returns a ``MorseMatching`` on the full simplex of its ground
set (for the quotient families) or on the family's complex itself (for the
matching complexes). The matching is assembled from blocks with
``cluster_compose``, and the blocks are kept on the result so they can be
recomposed and checked independently.

Every structural fact the construction relies on (that a partner face
exists and lands in the right block, that a residual graph splits the way
it should) is checked as it is used and raises ``ClaimViolation`` when it
fails. With ``check_claims=True`` additional facts that the construction
does not strictly need are checked too; counts of checked instances are
recorded in ``matching.meta["claims"]``.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from functools import lru_cache

import numpy as np

from . import ground as gr
from .errors import ClaimViolation, DomainError
from .families import FamilySpec, face_masks
from .morse import MorseMatching, cluster_compose, simplex_poset, FacePoset

__all__ = [
    "build_fc_matching",
    "build_bfc_matching",
    "build_nm_matching",
    "build_bnm_matching",
]


class _Embedding:
    """Edge relabelling from a small ground into a big one."""

    def __init__(self, big: gr.Ground, small: gr.Ground, vmap: dict[int, int]):
        self.small = small
        self.bits = [big.bit(vmap[a], vmap[b]) for a, b in small.endpoints]
        self.cover = 0
        for b in self.bits:
            self.cover |= b

    def project(self, mask: int) -> int:
        out = 0
        for i, b in enumerate(self.bits):
            if mask & b:
                out |= 1 << i
        return out

    def embed(self, small_mask: int) -> int:
        out = 0
        for i, b in enumerate(self.bits):
            if small_mask >> i & 1:
                out |= b
        return out


def _claim(ok: bool, claims: Counter, name: str, detail: str = "") -> None:
    if not ok:
        raise ClaimViolation(f"{name} fails{': ' + detail if detail else ''}")
    claims[name] += 1


def _product_partner(mask: int, pieces) -> int | None:
    """Partner of ``mask`` under the product of per-piece matchings, giving
    priority to earlier pieces."""
    for emb, partner in pieces:
        h = emb.project(mask)
        p = partner.get(h)
        if p is not None:
            return (mask & ~emb.cover) | emb.embed(p)
    return None


def _as_pairs(faces, partner_of) -> list[tuple[int, int]]:
    pairs = []
    for G in faces:
        H = partner_of(G)
        if H is not None and H.bit_count() == G.bit_count() + 1:
            pairs.append((H, G))
    return pairs


def _block(ground, faces, pairs):
    return (np.array(sorted(faces), dtype=np.int64), MorseMatching.from_pairs(ground, pairs))


def _finish(ground, blocks, poset, claims) -> MorseMatching:
    m = cluster_compose(blocks, poset=poset, check=False)
    return MorseMatching(m.ground, m.upper, m.lower, blocks=m.blocks, meta={"claims": dict(claims)})


def _complete_embedding(big: gr.Ground, vertices) -> _Embedding:
    vs = sorted(vertices)
    return _Embedding(big, gr.complete_ground(len(vs)), {i + 1: v for i, v in enumerate(vs)})


@lru_cache(maxsize=None)
def _fc_partners(m: int) -> dict[int, int]:
    return build_fc_matching(m).partner_map()


@lru_cache(maxsize=None)
def _bfc_partners(q: int, s: int) -> dict[int, int]:
    return build_bfc_matching(q, s).partner_map()


# ---------------------------------------------------------------------------
# factor-critical graphs on [n]


@lru_cache(maxsize=None)
def build_fc_matching(n: int, check_claims: bool = False) -> MorseMatching:
    """Acyclic matching on the full simplex of ``K_n`` (odd ``n``) whose
    critical cells are the non-factor-critical graphs together with the
    trees of triangles on ``[n]``."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"n must be odd and positive, got {n}")
    g = gr.complete_ground(n)
    gr.check_edges(g)
    poset = simplex_poset(g)
    fc = gr.factor_critical_array(g)
    cells = np.flatnonzero(fc).astype(np.int64)
    claims: Counter = Counter()
    blocks = [(np.flatnonzero(~fc).astype(np.int64), MorseMatching.empty(g))]
    if n == 1:
        blocks.append((cells, MorseMatching.empty(g)))
        return _finish(g, blocks, poset, claims)

    # toggle the edge 12 wherever both sides stay factor critical
    e12 = g.bit(1, 2)
    has = (cells & e12) != 0
    low0 = cells[~has]
    up0 = low0 | e12
    blocks.append((np.concatenate([low0, up0]), MorseMatching(g, up0, low0)))
    c0 = cells[has & ~fc[cells ^ e12]].tolist()

    half = (n - 1) // 2
    info = {G: gr.gallai_edmonds_mask(g, G ^ e12) for G in c0}
    if check_claims:
        for G, ge in info.items():
            _claim(ge.nu == half, claims, "residual has near-perfect matching number")
            c1, c2 = ge.component_of(1), ge.component_of(2)
            _claim(c1 != 0 and c2 != 0 and c1 != c2, claims, "1 and 2 in distinct deficient components")
            _claim(ge.A != 0, claims, "barrier nonempty")
            _claim(len(ge.components) - ge.A.bit_count() == 1, claims, "deficiency one")

    # barrier of size >= 2: toggle the edge between its two least vertices
    m1, multi = [], 0
    groups: dict[tuple, list[int]] = defaultdict(list)
    for G, ge in info.items():
        A = gr.vertices_of(ge.A)
        if len(A) > 1:
            multi += 1
            e = g.bit(A[0], A[1])
            if G & e:
                other = info.get(G ^ e)
                _claim(other is not None and gr.vertices_of(other.A)[:2] == A[:2], claims,
                       "barrier edge toggle stays in residual set", str(G))
                m1.append((G, G ^ e))
        else:
            c1, c2 = ge.component_of(1), ge.component_of(2)
            _claim(len(A) == 1 and len(ge.components) == 2 and c1 != c2, claims,
                   "single barrier vertex splits two components", str(G))
            groups[(A[0], c1 & ~2, c2 & ~4, ge.C)].append(G)
    _claim(2 * len(m1) == multi, claims, "barrier toggle covers every residual with |A|>1")

    # The barrier-toggle pairs and the per-(a, X, Y, Z) blocks are not
    # separable clusters in general (from n = 7 on their induced block
    # relation has cycles), so they form a single cluster on the residual
    # set and its acyclicity is certified directly.
    fine = [_block(g, [x for p in m1 for x in p], m1)]
    for key in sorted(groups):
        fine.append(_fc_block(g, key, groups[key], claims, check_claims))
    blocks.append(_merge(g, fine))
    out = _finish(g, blocks, poset, claims)
    out.meta["fine_blocks"] = tuple(fine)
    return out


def _merge(ground, blocks):
    faces = np.concatenate([f for f, _ in blocks]) if blocks else np.zeros(0, dtype=np.int64)
    pairs = [p for _, m in blocks for p in m.pairs()]
    return np.sort(faces), MorseMatching.from_pairs(ground, pairs)


def _fc_block(g, key, faces, claims, check_claims):
    a, X, Y, Z = key
    fset = set(faces)
    e1a, e2a = g.bit(1, a), g.bit(2, a)
    pairs = []
    for G in faces:
        if not G & e1a:
            _claim(G | e1a in fset, claims, "toggle 1a stays in block", str(G))
            pairs.append((G | e1a, G))
    matched = {x for p in pairs for x in p}
    c1 = [G for G in faces if G not in matched]
    if check_claims:
        for G in faces:
            na = gr.neighbors_mask(g, G, a)
            _claim((G in matched) == bool(na & X), claims, "1a-critical iff a has no neighbour in X")
    c1set = set(c1)
    second = []
    for G in c1:
        if not G & e2a:
            _claim(G | e2a in c1set, claims, "toggle 2a stays in block", str(G))
            second.append((G | e2a, G))
    pairs += second
    matched |= {x for p in second for x in p}
    c2 = [G for G in c1 if G not in matched]

    tri = g.bit(1, 2) | e1a | e2a
    pieces = []
    for vs in (gr.vertices_of(X | 2), gr.vertices_of(Y | 4), gr.vertices_of(Z | 1 << a)):
        emb = _complete_embedding(g, vs)
        pieces.append((emb, _fc_partners(len(vs)), gr.factor_critical_array(emb.small)))
    cover = tri
    for emb, _, _ in pieces:
        cover |= emb.cover
    for G in c2:
        _claim(G & ~cover == 0 and G & tri == tri, claims, "residual is triangle plus three pieces", str(G))
        if check_claims:
            for emb, _, fcs in pieces:
                _claim(bool(fcs[emb.project(G)]), claims, "each piece factor critical")
    prod = [(emb, partner) for emb, partner, _ in pieces]
    pairs += _as_pairs(c2, lambda G: _product_partner(G, prod))
    return _block(g, faces, pairs)


# ---------------------------------------------------------------------------
# q-factor-critical bipartite graphs on [q] x [s]


@lru_cache(maxsize=None)
def build_bfc_matching(q: int, s: int, check_claims: bool = False) -> MorseMatching:
    """Acyclic matching on the full simplex of ``K_{q,s}`` (``q < s``) whose
    critical cells are the non-q-factor-critical graphs together with
    ``C(s-1, q)`` cells of dimension ``2q``."""
    if q < 0 or s <= q:
        raise DomainError(f"need 0 <= q < s, got q={q}, s={s}")
    g = gr.bipartite_ground(q, s)
    gr.check_edges(g)
    poset = simplex_poset(g)
    qfc = gr.q_factor_critical_array(g)
    cells = np.flatnonzero(qfc).astype(np.int64)
    claims: Counter = Counter()
    blocks = [(np.flatnonzero(~qfc).astype(np.int64), MorseMatching.empty(g))]
    if q == 0:
        blocks.append((cells, MorseMatching.empty(g)))
        return _finish(g, blocks, poset, claims)

    one_bar = q + 1
    right = gr.vertex_mask(range(q + 1, q + s + 1))
    e11 = g.bit(1, one_bar)
    has = (cells & e11) != 0
    low0 = cells[~has]
    up0 = low0 | e11
    blocks.append((np.concatenate([low0, up0]), MorseMatching(g, up0, low0)))
    c0 = cells[has & ~qfc[cells ^ e11]].tolist()

    info = {G: gr.gallai_edmonds_mask(g, G ^ e11) for G in c0}
    if check_claims:
        for G, ge in info.items():
            _claim(ge.nu == q and bool(ge.D >> one_bar & 1), claims, "residual matching number q, 1bar deficient")
            _claim(ge.D & ~right == 0, claims, "deficient set on the right")
            _claim(bool(ge.C >> 1 & 1), claims, "vertex 1 covered")

    m1, with_barrier = [], 0
    groups: dict[int, list[int]] = defaultdict(list)
    for G, ge in info.items():
        cr = ge.C & right
        if ge.A:
            with_barrier += 1
            _claim(cr != 0, claims, "covered right vertices exist", str(G))
            e = g.bit(gr.vertices_of(ge.A)[0], gr.vertices_of(cr)[0])
            if G & e:
                other = info.get(G ^ e)
                ok = other is not None and other.A != 0 and (
                    gr.vertices_of(other.A)[0], gr.vertices_of(other.C & right)[0]
                ) == (gr.vertices_of(ge.A)[0], gr.vertices_of(cr)[0])
                _claim(ok, claims, "barrier edge toggle stays in residual set", str(G))
                m1.append((G, G ^ e))
        else:
            groups[ge.D & ~(1 << one_bar)].append(G)
    _claim(2 * len(m1) == with_barrier, claims, "barrier toggle covers every residual with A nonempty")
    blocks.append(_block(g, [x for p in m1 for x in p], m1))

    for X in sorted(groups):
        blocks.append(_bfc_block(g, q, s, X, groups[X], info, claims, check_claims))
    return _finish(g, blocks, poset, claims)


def _bfc_block(g, q, s, X, faces, info, claims, check_claims):
    one_bar = q + 1
    right = gr.vertex_mask(range(q + 1, q + s + 1))
    cright = right & ~X & ~(1 << one_bar)
    cvs = gr.vertices_of(cright)
    _claim(len(cvs) == q, claims, "q right vertices covered", str(X))
    c = cvs[0]
    e1c = g.bit(1, c)
    fset = set(faces)
    pairs = []
    for G in faces:
        _claim(info[G].C & right == cright, claims, "covered right set fixed by block")
        if not G & e1c:
            _claim(G | e1c in fset, claims, "toggle 1c stays in block", str(G))
            pairs.append((G | e1c, G))
    matched = {x for p in pairs for x in p}
    rest = [G for G in faces if G not in matched]

    e11 = g.bit(1, one_bar)
    small = gr.bipartite_ground(q - 1, q)
    vmap = {i: i + 1 for i in range(1, q)}
    vmap.update({q - 1 + j: v for j, v in enumerate(cvs, start=1)})
    emb = _Embedding(g, small, vmap)
    partner = _bfc_partners(q - 1, q)
    sub_qfc = gr.q_factor_critical_array(small)
    base = e11 | e1c
    for G in rest:
        _claim(G & base == base and G & ~(base | emb.cover) == 0, claims,
               "vertex 1 sees exactly 1bar and c", str(G))
        if check_claims:
            _claim(bool(sub_qfc[emb.project(G)]), claims, "remainder is (q-1)-factor critical")
    pairs += _as_pairs(rest, lambda G: _product_partner(G, [(emb, partner)]))
    return _block(g, faces, pairs)


# ---------------------------------------------------------------------------
# matching complexes


def _element_rounds(ground, faces, edges):
    """Sequential element matchings: for each edge in turn pair ``G`` with
    ``G + e`` when both are faces and neither is matched yet."""
    free = set(faces)
    blocks = []
    for e in edges:
        pairs = []
        for G in sorted(free):
            if not G & e and G | e in free:
                pairs.append((G | e, G))
        for H, G in pairs:
            free.discard(H)
            free.discard(G)
        blocks.append(_block(ground, [x for p in pairs for x in p], pairs))
    return blocks, sorted(free)


def _components(ground, mask, vertices) -> list[int]:
    left = gr.vertex_mask(vertices)
    comps = []
    while left:
        low = left & -left
        comp = low
        stack = [low.bit_length() - 1]
        while stack:
            x = stack.pop()
            for bit, w in ground.star[x]:
                if mask & bit and left >> w & 1 and not comp >> w & 1:
                    comp |= 1 << w
                    stack.append(w)
        comps.append(comp)
        left &= ~comp
    return comps


@lru_cache(maxsize=None)
def build_nm_matching(n: int, k: int, check_claims: bool = False) -> MorseMatching:
    """Acyclic matching on the complex of graphs on ``[n]`` with matching
    number below ``k``; the critical cells (besides the empty face when
    nothing else survives) are forests of triangles with ``n - 2k + 1``
    components spanning ``[n-1]``."""
    spec = FamilySpec.nm(n, k)
    g = spec.ground
    poset = FacePoset.from_masks(g, face_masks(spec), label=spec.label)
    faces = poset.faces.tolist()
    claims: Counter = Counter()
    blocks, critical = _element_rounds(g, faces, [g.bit(v, n) for v in range(1, n)])

    groups: dict[tuple, list[int]] = defaultdict(list)
    for G in critical:
        _claim(G & g.incident[n] == 0, claims, "vertex n isolated in residual", str(G))
        groups[tuple(_components(g, G, range(1, n)))].append(G)
    nub = gr.nu_bytes(g)
    for key in sorted(groups):
        pieces = []
        for comp in key:
            vs = gr.vertices_of(comp)
            _claim(len(vs) % 2 == 1, claims, "residual components odd", str(key))
            emb = _complete_embedding(g, vs)
            pieces.append((emb, _fc_partners(len(vs))))
        if check_claims:
            _claim(len(key) == n - 2 * k + 1, claims, "component count n-2k+1")
            for G in groups[key]:
                for v in range(1, n):
                    _claim(nub[G | g.bit(v, n)] >= k, claims, "adding any vn reaches matching number k")
                for emb, _ in pieces:
                    fcs = gr.factor_critical_array(emb.small)
                    _claim(bool(fcs[emb.project(G)]), claims, "components factor critical")
        pairs = _as_pairs(groups[key], lambda G: _product_partner(G, pieces))
        blocks.append(_block(g, groups[key], pairs))
    return _finish(g, blocks, poset, claims)


@lru_cache(maxsize=None)
def build_bnm_matching(r: int, s: int, k: int, check_claims: bool = False) -> MorseMatching:
    """Acyclic matching on the complex of subgraphs of ``K_{r,s}`` with
    matching number below ``k``; critical cells are ``(k-1)``-factor-critical
    graphs on ``S x [s]`` for ``(k-1)``-subsets ``S`` of ``[r-1]``."""
    spec = FamilySpec.bnm(r, s, k)
    g = spec.ground
    poset = FacePoset.from_masks(g, face_masks(spec), label=spec.label)
    claims: Counter = Counter()
    blocks, critical = _element_rounds(g, poset.faces.tolist(), [g.bit(r, r + v) for v in range(1, s + 1)])

    q = k - 1
    groups: dict[int, list[int]] = defaultdict(list)
    for G in critical:
        S = 0
        for u in range(1, r + 1):
            if G & g.incident[u]:
                S |= 1 << u
        _claim(S.bit_count() == q and not S >> r & 1, claims, "k-1 active left vertices, r isolated", str(G))
        groups[S].append(G)
    for S in sorted(groups):
        small = gr.bipartite_ground(q, s)
        vmap = {i + 1: u for i, u in enumerate(gr.vertices_of(S))}
        vmap.update({q + j: r + j for j in range(1, s + 1)})
        emb = _Embedding(g, small, vmap)
        if check_claims:
            qfc = gr.q_factor_critical_array(small)
            for G in groups[S]:
                _claim(bool(qfc[emb.project(G)]), claims, "active part (k-1)-factor critical")
        pieces = [(emb, _bfc_partners(q, s))]
        pairs = _as_pairs(groups[S], lambda G: _product_partner(G, pieces))
        blocks.append(_block(g, groups[S], pairs))
    return _finish(g, blocks, poset, claims)
