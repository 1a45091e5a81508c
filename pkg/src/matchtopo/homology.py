"""Integer chain complexes of face posets and their homology.

A face with edges ``e_0 < ... < e_d`` (canonical edge order) has boundary
``sum_i (-1)^i (face - e_i)``; terms that leave the poset are dropped, so a
down-closed complex containing the empty face yields reduced homology and
the cells of a quotient ``Sigma/Gamma`` yield the relative complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np
from scipy import sparse

from . import ground as gr
from .errors import DomainError
from .families import FamilySpec, signed_euler_sum
from .morse import FacePoset, face_poset

__all__ = [
    "SparseMatrix",
    "SNF",
    "ChainComplex",
    "HomologyProfile",
    "smith_normal_form",
    "rank_mod_p",
    "chain_complex",
    "reduced_homology",
    "euler_crosscheck",
    "suspension_check",
    "CHECK_PRIMES",
]

# three primes above 2^20 for the rank pre-screen
CHECK_PRIMES = (1048583, 1048589, 1048601)


@dataclass
class SparseMatrix:
    """Integer matrix stored as one ``{row: value}`` dict per column."""

    nrows: int
    ncols: int
    cols: list[dict[int, int]]

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseMatrix":
        rows = [list(map(int, r)) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = [{i: rows[i][j] for i in range(nrows) if rows[i][j]} for j in range(ncols)]
        return cls(nrows, ncols, cols)

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = sparse.csc_matrix(m)
        cols = []
        for j in range(m.shape[1]):
            lo, hi = m.indptr[j], m.indptr[j + 1]
            cols.append({int(i): int(v) for i, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v})
        return cls(m.shape[0], m.shape[1], cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def copy(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, [dict(c) for c in self.cols])


def _as_sparse(m) -> SparseMatrix:
    if isinstance(m, SparseMatrix):
        return m.copy()
    if sparse.issparse(m):
        return SparseMatrix.from_scipy(m)
    return SparseMatrix.from_dense(np.asarray(m, dtype=object).tolist() if len(m) else [])


@dataclass(frozen=True)
class SNF:
    invariants: tuple[int, ...]  # nonzero diagonal, d_1 | d_2 | ...
    rank: int

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariants if d > 1)


def _eliminate_units(cols: list[dict[int, int]], modulus: int | None = None):
    """Pivot on unit entries until none remain.

    Each pivot removes one row and one column (a Schur complement step),
    which preserves the invariant factors. Pivots are chosen column by
    column, shortest first, taking the entry whose row is sparsest.
    Returns the number of pivots and the surviving columns.
    """
    rows: dict[int, set[int]] = {}
    for j, col in enumerate(cols):
        for i in col:
            rows.setdefault(i, set()).add(j)
    alive = set(j for j, c in enumerate(cols) if c)
    pivots = 0

    def is_unit(v):
        return v != 0 if modulus else v in (1, -1)

    progress = True
    while progress:
        progress = False
        for j in sorted(alive, key=lambda c: (len(cols[c]), c)):
            if j not in alive:
                continue
            col = cols[j]
            if not col:
                alive.discard(j)
                continue
            best = None
            for i, v in col.items():
                if is_unit(v) and (best is None or (len(rows[i]), i) < (len(rows[best]), best)):
                    best = i
            if best is None:
                continue
            i = best
            a = col[i]
            inv = pow(a, -1, modulus) if modulus else a
            alive.discard(j)
            for i2 in col:
                rows[i2].discard(j)
            for k in list(rows[i]):
                ck = cols[k]
                f = ck[i] * inv
                for i2, v in col.items():
                    nv = ck.get(i2, 0) - f * v
                    if modulus:
                        nv %= modulus
                    if nv:
                        if i2 not in ck:
                            rows[i2].add(k)
                        ck[i2] = nv
                    elif i2 in ck:
                        del ck[i2]
                        rows[i2].discard(k)
                if not ck:
                    alive.discard(k)
            del rows[i]
            cols[j] = {}
            pivots += 1
            progress = True
    return pivots, [cols[j] for j in sorted(alive) if cols[j]]


def _dense_snf_diagonal(cols: list[dict[int, int]]) -> list[int]:
    """Nonzero diagonal of a Smith form of the matrix given by ``cols``."""
    if not cols:
        return []
    row_ids = sorted({i for c in cols for i in c})
    pos = {r: k for k, r in enumerate(row_ids)}
    A = [[0] * len(cols) for _ in row_ids]
    for j, c in enumerate(cols):
        for i, v in c.items():
            A[pos[i]][j] = v
    m, n = len(A), len(cols)
    diag = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        done = False
            if done:
                break
            # move the smallest leftover in row/column t to the pivot
            cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cands += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cands)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def _normalize(diag: list[int]) -> list[int]:
    d = sorted(x for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


def smith_normal_form(matrix) -> SNF:
    """Invariant factors and rank of an integer matrix.

    Accepts a ``SparseMatrix``, a scipy sparse matrix, or a dense
    row-major sequence.
    """
    m = _as_sparse(matrix)
    units, rest = _eliminate_units(m.cols)
    diag = _normalize([1] * units + _dense_snf_diagonal(rest))
    return SNF(tuple(diag), len(diag))


def rank_mod_p(matrix, p: int) -> int:
    m = _as_sparse(matrix)
    cols = [{i: v % p for i, v in c.items() if v % p} for c in m.cols]
    pivots, rest = _eliminate_units(cols, modulus=p)
    assert not rest
    return pivots


# ---------------------------------------------------------------------------
# chain complexes


def _sign(d: int) -> int:
    return -1 if d % 2 else 1


@dataclass
class ChainComplex:
    """``basis_by_dim[d]`` lists face masks in canonical order; ``boundary_by_dim[d]``
    is the scipy CSC matrix of ``C_d -> C_{d-1}`` (rows index dimension d-1)."""

    basis_by_dim: dict[int, np.ndarray]
    boundary_by_dim: dict[int, sparse.csc_matrix]
    label: str = ""
    relative: bool = False

    @property
    def dimensions(self) -> list[int]:
        return sorted(self.basis_by_dim)

    def f_vector(self) -> dict[int, int]:
        return {d: len(b) for d, b in sorted(self.basis_by_dim.items())}

    def euler_characteristic(self) -> int:
        return sum(_sign(d) * len(b) for d, b in self.basis_by_dim.items())

    def check_boundary_squared(self) -> bool:
        for d in self.dimensions:
            if d in self.boundary_by_dim and d - 1 in self.boundary_by_dim:
                prod = self.boundary_by_dim[d - 1] @ self.boundary_by_dim[d]
                if prod.count_nonzero():
                    return False
        return True


def chain_complex_of(poset: FacePoset) -> ChainComplex:
    faces = poset.faces
    dims = gr.popcount(faces) - 1
    basis = {}
    for d in np.unique(dims).tolist():
        basis[d] = np.sort(faces[dims == d])  # ascending mask = canonical within a dimension
    boundary = {}
    E = poset.ground.num_edges
    for d, cells in basis.items():
        below = basis.get(d - 1)
        nrows = 0 if below is None else len(below)
        rows, cols, vals = [], [], []
        if below is not None:
            for y in range(E):
                b = np.int64(1 << y)
                sel = np.flatnonzero((cells & b) != 0)
                if len(sel) == 0:
                    continue
                target = cells[sel] ^ b
                pos = np.searchsorted(below, target)
                pos = np.minimum(pos, len(below) - 1)
                ok = below[pos] == target
                sign = 1 - 2 * (gr.popcount(cells[sel] & (b - 1)) % 2)
                rows.append(pos[ok])
                cols.append(sel[ok])
                vals.append(sign[ok])
        if rows:
            r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        else:
            r = c = v = np.zeros(0, dtype=np.int64)
        boundary[d] = sparse.csc_matrix((v.astype(np.int64), (r, c)), shape=(nrows, len(cells)))
    return ChainComplex(basis, boundary, poset.label, poset.quotient)


def chain_complex(spec: FamilySpec | FacePoset) -> ChainComplex:
    """Reduced complex for simplicial kinds, relative complex for quotients."""
    poset = spec if isinstance(spec, FacePoset) else face_poset(spec)
    return chain_complex_of(poset)


@dataclass(frozen=True)
class HomologyProfile:
    betti: dict[int, int]
    torsion: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def torsion_free(self) -> bool:
        return not self.torsion

    def euler_characteristic(self) -> int:
        return sum(_sign(d) * b for d, b in self.betti.items())

    def to_json(self) -> dict:
        return {
            "betti": {str(d): b for d, b in sorted(self.betti.items())},
            "torsion": {str(d): list(t) for d, t in sorted(self.torsion.items())},
        }


def homology_of(cx: ChainComplex, crosscheck: bool = True) -> HomologyProfile:
    snfs = {}
    for d, mat in cx.boundary_by_dim.items():
        if mat.shape[0] and mat.shape[1] and mat.count_nonzero():
            snf = smith_normal_form(mat)
            if crosscheck:
                for p in CHECK_PRIMES:
                    rp = rank_mod_p(mat, p)
                    if rp != snf.rank and not any(x % p == 0 for x in snf.invariants):
                        raise AssertionError(f"rank mod {p} is {rp}, integer rank {snf.rank} (dim {d})")
        else:
            snf = SNF((), 0)
        snfs[d] = snf
    betti, torsion = {}, {}
    for d, cells in cx.basis_by_dim.items():
        rank_out = snfs[d].rank if d in snfs else 0
        rank_in = snfs[d + 1].rank if d + 1 in snfs else 0
        b = len(cells) - rank_out - rank_in
        if b:
            betti[d] = b
        if d + 1 in snfs and snfs[d + 1].torsion:
            torsion[d] = snfs[d + 1].torsion
    return HomologyProfile(betti, torsion)


def reduced_homology(spec: FamilySpec | FacePoset | ChainComplex, crosscheck: bool = True) -> HomologyProfile:
    cx = spec if isinstance(spec, ChainComplex) else chain_complex(spec)
    return homology_of(cx, crosscheck)


def euler_crosscheck(spec: FamilySpec) -> dict:
    cx = chain_complex(spec)
    prof = homology_of(cx)
    chi_faces = cx.euler_characteristic()
    chi_betti = prof.euler_characteristic()
    signed = signed_euler_sum(spec)
    return {
        "family": spec.label,
        "reduced_euler_from_faces": chi_faces,
        "reduced_euler_from_betti": chi_betti,
        "signed_euler_sum": signed,
        "agree": chi_faces == chi_betti and signed == -chi_faces,
    }


def suspension_check(n: int) -> dict:
    """Compare the relative homology of the factor-critical quotient with
    the homology of the non-factor-critical complex shifted by one."""
    if n % 2 == 0 or n < 3 or n > 7:
        raise DomainError(f"suspension check needs odd 3 <= n <= 7, got {n}")
    fc = reduced_homology(FamilySpec.fc(n))
    nfc = reduced_homology(FamilySpec.nfc(n))
    shifted_b = {d + 1: b for d, b in nfc.betti.items()}
    shifted_t = {d + 1: t for d, t in nfc.torsion.items()}
    return {
        "n": n,
        "fc": fc.to_json(),
        "nfc": nfc.to_json(),
        "agree": fc.betti == shifted_b and fc.torsion == shifted_t,
    }
