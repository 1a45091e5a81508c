"""Graph families (complexes) with bounded matching size or factor
criticality: membership, pruned enumeration, signed Euler sums and the
closed-form sphere counts.

Kinds ``NM, NPM, BNM, NFC, NBFC`` (and ``GENERIC``) are simplicial
complexes: down-closed families of graphs, the empty graph included.
``FC`` and ``BFC`` are quotients of the full simplex by ``NFC`` / ``NBFC``;
their "faces" are the cells, i.e. the factor-critical graphs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Callable, Iterator

import numpy as np

from . import ground as gr
from .errors import DomainError, ResourceError
from .graphs import (
    BipartiteGraph,
    Graph,
    is_factor_critical,
    is_q_factor_critical,
    matching_number,
)
from .triangles import count_odd_partition_weight, double_factorial

__all__ = [
    "Kind",
    "FamilySpec",
    "SphereCountPrediction",
    "DEFAULT_FACE_CAP",
    "contains",
    "enumerate_faces",
    "face_masks",
    "signed_euler_sum",
    "predicted_spheres",
    "predicted_euler_sum",
]

DEFAULT_FACE_CAP = 1 << 21


class Kind(str, Enum):
    NM = "nm"
    NPM = "npm"
    BNM = "bnm"
    FC = "fc"
    NFC = "nfc"
    BFC = "bfc"
    NBFC = "nbfc"
    GENERIC = "generic"


@dataclass(frozen=True)
class FamilySpec:
    kind: Kind
    n: int | None = None
    k: int | None = None
    r: int | None = None
    s: int | None = None
    q: int | None = None
    predicate: Callable | None = field(default=None, compare=False, repr=False)
    name: str | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (Kind.NM, Kind.NPM, Kind.FC, Kind.NFC):
            _need(self.n, "n", 1)
        if kind is Kind.NM:
            _need(self.k, "k", 1)
        if kind is Kind.NPM and self.n % 2:
            raise DomainError("NPM needs an even vertex count")
        if kind in (Kind.FC, Kind.NFC) and self.n % 2 == 0:
            raise DomainError("FC/NFC need an odd vertex count")
        if kind is Kind.NFC and self.n < 3:
            raise DomainError("NFC_n is the void complex for n < 3")
        if kind is Kind.BNM:
            _need(self.r, "r", 1)
            _need(self.s, "s", 1)
            _need(self.k, "k", 1)
        if kind in (Kind.BFC, Kind.NBFC):
            _need(self.q, "q", 1 if kind is Kind.NBFC else 0)
            _need(self.s, "s", 1)
            if self.q >= self.s:
                raise DomainError(f"need q < s, got q={self.q}, s={self.s}")
        if kind is Kind.GENERIC:
            if self.predicate is None:
                raise DomainError("GENERIC needs a predicate")
            if self.n is None and (self.r is None or self.s is None):
                raise DomainError("GENERIC needs n, or r and s")
            _check_monotone(self)

    # constructors ---------------------------------------------------------
    @classmethod
    def nm(cls, n: int, k: int) -> "FamilySpec":
        return cls(Kind.NM, n=n, k=k)

    @classmethod
    def npm(cls, n: int) -> "FamilySpec":
        return cls(Kind.NPM, n=n)

    @classmethod
    def bnm(cls, r: int, s: int, k: int) -> "FamilySpec":
        return cls(Kind.BNM, r=r, s=s, k=k)

    @classmethod
    def fc(cls, n: int) -> "FamilySpec":
        return cls(Kind.FC, n=n)

    @classmethod
    def nfc(cls, n: int) -> "FamilySpec":
        return cls(Kind.NFC, n=n)

    @classmethod
    def bfc(cls, q: int, s: int) -> "FamilySpec":
        return cls(Kind.BFC, q=q, s=s)

    @classmethod
    def nbfc(cls, q: int, s: int) -> "FamilySpec":
        return cls(Kind.NBFC, q=q, s=s)

    @classmethod
    def generic(cls, predicate: Callable, *, n: int | None = None, r: int | None = None,
                s: int | None = None, name: str | None = None) -> "FamilySpec":
        """Down-closed family given by ``predicate(graph) -> bool``."""
        return cls(Kind.GENERIC, n=n, r=r, s=s, predicate=predicate, name=name)

    # derived --------------------------------------------------------------
    @property
    def is_bipartite(self) -> bool:
        if self.kind is Kind.GENERIC:
            return self.n is None
        return self.kind in (Kind.BNM, Kind.BFC, Kind.NBFC)

    @property
    def is_quotient(self) -> bool:
        return self.kind in (Kind.FC, Kind.BFC)

    @property
    def ground(self) -> gr.Ground:
        if self.kind in (Kind.BFC, Kind.NBFC):
            return gr.bipartite_ground(self.q, self.s)
        if self.is_bipartite:
            return gr.bipartite_ground(self.r, self.s)
        return gr.complete_ground(self.n)

    @property
    def matching_bound(self) -> int | None:
        """``k`` such that members are exactly the graphs with ``nu < k``."""
        if self.kind in (Kind.NM, Kind.BNM):
            return self.k
        if self.kind is Kind.NPM:
            return self.n // 2
        return None

    @property
    def label(self) -> str:
        kind = self.kind
        if kind is Kind.NM:
            return f"NM({self.n},{self.k})"
        if kind is Kind.BNM:
            return f"BNM({self.r},{self.s},{self.k})"
        if kind in (Kind.NPM, Kind.FC, Kind.NFC):
            return f"{kind.name}({self.n})"
        if kind in (Kind.BFC, Kind.NBFC):
            return f"{kind.name}({self.q},{self.s})"
        return self.name or "GENERIC"

    def params(self) -> dict:
        out = {"family": self.kind.value}
        for key in ("n", "k", "r", "s", "q"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def collapsed(self) -> "FamilySpec":
        """The subcomplex ``Gamma`` collapsed by a quotient kind."""
        if self.gamma_is_void:
            raise DomainError(f"{self.label} collapses the void complex")
        if self.kind is Kind.FC:
            return FamilySpec.nfc(self.n)
        if self.kind is Kind.BFC:
            return FamilySpec.nbfc(self.q, self.s)
        raise DomainError(f"{self.label} is not a quotient")

    @property
    def gamma_is_void(self) -> bool:
        """NFC_1 and NBFC(0,s) contain no face at all, not even the empty one."""
        return (self.kind is Kind.FC and self.n == 1) or (self.kind is Kind.BFC and self.q == 0)


def _need(value, name, low):
    if value is None:
        raise DomainError(f"missing parameter {name}")
    if value < low:
        raise DomainError(f"parameter {name} must be >= {low}, got {value}")


def _check_monotone(spec: FamilySpec, samples: int = 256, seed: int = 0) -> None:
    g = spec.ground
    E = g.num_edges
    if E > gr.MAX_EDGES:
        raise ResourceError(f"ground set has {E} edges; cap is {gr.MAX_EDGES}")
    rng = random.Random(seed)

    def sampled():
        # random edge densities so that sparse families still get members
        for _ in range(samples):
            p = rng.random()
            yield sum(1 << i for i in range(E) if rng.random() < p)

    masks = range(1 << E) if E <= 10 else sampled()
    for m in masks:
        if not spec.predicate(g.to_object(m)):
            continue
        rest = m
        while rest:
            low = rest & -rest
            rest ^= low
            if not spec.predicate(g.to_object(m ^ low)):
                raise DomainError(f"predicate is not closed under edge deletion at mask {m}")


@dataclass(frozen=True)
class SphereCountPrediction:
    dimension: int
    count: int
    tag: str = ""


# ---------------------------------------------------------------------------
# membership


def _check_ground(spec: FamilySpec, g) -> None:
    want = spec.ground
    if isinstance(g, BipartiteGraph):
        ok = want.kind == "bipartite" and (g.r, g.s) == (want.r, want.s)
    elif isinstance(g, Graph):
        ok = want.kind == "graph" and g.n == want.n and len(g.vertices) == g.n
    else:
        ok = False
    if not ok:
        raise DomainError(f"graph does not live on the ground set of {spec.label}")


def contains(spec: FamilySpec, g) -> bool:
    """Membership by direct matching computations (no lookup tables)."""
    _check_ground(spec, g)
    kind = spec.kind
    bound = spec.matching_bound
    if bound is not None:
        return matching_number(g) < bound
    if kind is Kind.FC:
        return is_factor_critical(g)
    if kind is Kind.NFC:
        return not is_factor_critical(g)
    if kind is Kind.BFC:
        return is_q_factor_critical(g, spec.q)
    if kind is Kind.NBFC:
        return not is_q_factor_critical(g, spec.q)
    return bool(spec.predicate(g))


def member_array(spec: FamilySpec, masks: np.ndarray) -> np.ndarray:
    """Vectorized membership of edge masks (table-driven)."""
    g = spec.ground
    bound = spec.matching_bound
    if bound is not None:
        return gr.nu_table(g)[masks] < bound
    kind = spec.kind
    if kind in (Kind.FC, Kind.NFC):
        arr = gr.factor_critical_array(g)[masks]
        return arr if kind is Kind.FC else ~arr
    if kind in (Kind.BFC, Kind.NBFC):
        arr = gr.q_factor_critical_array(g)[masks]
        return arr if kind is Kind.BFC else ~arr
    return np.fromiter((bool(spec.predicate(g.to_object(int(m)))) for m in masks), dtype=bool, count=len(masks))


# ---------------------------------------------------------------------------
# enumeration


def _down_closed(spec: FamilySpec, face_cap: int) -> np.ndarray:
    """Members of a down-closed family. Supersets of a non-member are never
    generated: a face with top edge ``e`` is only proposed as ``f + e`` for a
    member ``f`` whose edges all precede ``e``."""
    E = spec.ground.num_edges
    faces = np.zeros(1, dtype=np.int64)
    if not member_array(spec, faces)[0]:
        return faces[:0]
    for e in range(E):
        cand = faces | (1 << e)
        faces = np.concatenate([faces, cand[member_array(spec, cand)]])
        if len(faces) > face_cap:
            raise ResourceError(f"{spec.label} exceeds the face cap {face_cap}")
    return faces


def canonical_order(masks: np.ndarray) -> np.ndarray:
    """Sort by edge count, then by bitset value."""
    masks = np.asarray(masks, dtype=np.int64)
    return masks[np.lexsort((masks, gr.popcount(masks)))]


def face_masks(spec: FamilySpec, face_cap: int = DEFAULT_FACE_CAP,
               max_edges: int = gr.MAX_EDGES) -> np.ndarray:
    """Faces (cells, for quotient kinds) as edge masks in canonical order."""
    g = spec.ground
    gr.check_edges(g, max_edges)
    if spec.is_quotient:
        if spec.gamma_is_void:
            faces = np.zeros(1, dtype=np.int64)
        else:
            gamma = _down_closed(spec.collapsed(), 1 << g.num_edges)
            keep = np.ones(1 << g.num_edges, dtype=bool)
            keep[gamma] = False
            faces = np.flatnonzero(keep).astype(np.int64)
            if len(faces) > face_cap:
                raise ResourceError(f"{spec.label} exceeds the face cap {face_cap}")
    else:
        faces = _down_closed(spec, face_cap)
    return canonical_order(faces)


def enumerate_faces(spec: FamilySpec, face_cap: int = DEFAULT_FACE_CAP,
                    max_edges: int = gr.MAX_EDGES) -> Iterator:
    g = spec.ground
    for m in face_masks(spec, face_cap, max_edges):
        yield g.to_object(int(m))


def signed_euler_sum(spec: FamilySpec, face_cap: int = DEFAULT_FACE_CAP) -> int:
    """``sum (-1)^|E(G)|`` over the family; equals minus the reduced Euler
    characteristic of the complex."""
    faces = face_masks(spec, face_cap)
    odd = int((gr.popcount(faces) & 1).sum())
    return len(faces) - 2 * odd


# ---------------------------------------------------------------------------
# closed forms


def predicted_spheres(spec: FamilySpec) -> SphereCountPrediction:
    """Dimension and number of spheres in the wedge the complex is
    homotopy equivalent to."""
    kind = spec.kind
    if kind is Kind.NM:
        n, k = spec.n, spec.k
        parts = n - 2 * k + 1
        count = count_odd_partition_weight(n - 1, parts) if parts >= 0 else 0
        return SphereCountPrediction(3 * k - 4, count, "nm-wedge-of-spheres")
    if kind is Kind.NPM:
        k = spec.n // 2
        return SphereCountPrediction(3 * k - 4, double_factorial(2 * k - 3) ** 2, "npm-wedge-of-spheres")
    if kind is Kind.BNM:
        r, s, k = spec.r, spec.s, spec.k
        return SphereCountPrediction(2 * k - 3, comb(r - 1, k - 1) * comb(s - 1, k - 1), "bnm-wedge-of-spheres")
    if kind in (Kind.FC, Kind.NFC):
        m = (spec.n + 1) // 2
        count = double_factorial(spec.n - 2) ** 2
        if kind is Kind.FC:
            return SphereCountPrediction(3 * m - 4, count, "fc-quotient-wedge")
        return SphereCountPrediction(3 * m - 5, count, "nfc-wedge")
    if kind in (Kind.BFC, Kind.NBFC):
        q, s = spec.q, spec.s
        if kind is Kind.BFC:
            return SphereCountPrediction(2 * q - 1, comb(s - 1, q), "bfc-quotient-wedge")
        return SphereCountPrediction(2 * q - 2, comb(s - 1, q), "nbfc-wedge")
    raise DomainError("no closed form for GENERIC families")


def predicted_euler_sum(spec: FamilySpec) -> int:
    """Signed sum implied by the prediction: ``(-1)^(d+1) * count``."""
    p = predicted_spheres(spec)
    return (-1) ** (p.dimension + 1) * p.count
