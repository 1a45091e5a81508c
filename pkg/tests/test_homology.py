from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.domains import ZZ

from matchtopo import builders as B
from matchtopo import ground as gr
from matchtopo.errors import DomainError
from matchtopo.families import FamilySpec, predicted_spheres, signed_euler_sum
from matchtopo.homology import (
    CHECK_PRIMES,
    SparseMatrix,
    chain_complex,
    euler_crosscheck,
    rank_mod_p,
    reduced_homology,
    smith_normal_form,
    suspension_check,
)
from matchtopo.morse import FacePoset, simplex_poset, verify

matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m)))


def oracle_invariants(rows):
    D = sympy_snf(Matrix(rows), domain=ZZ)
    return sorted(abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0)


def test_snf_examples():
    assert smith_normal_form([[1, 0], [0, 1]]).invariants == (1, 1)
    assert smith_normal_form([[2]]).invariants == (2,)
    assert smith_normal_form([[2, 0], [0, 3]]).invariants == (1, 6)
    assert smith_normal_form([[0, 0], [0, 0]]).rank == 0
    # boundary of the triangle cycle: vertices a, b, c; edges ab, ac, bc
    d1 = [[-1, -1, 0], [1, 0, -1], [0, 1, 1]]
    snf = smith_normal_form(d1)
    assert snf.rank == 2 and snf.invariants == (1, 1)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_matches_sympy(rows):
    snf = smith_normal_form(rows)
    assert list(snf.invariants) == oracle_invariants(rows)
    for a, b in zip(snf.invariants, snf.invariants[1:]):
        assert b % a == 0


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_rank_mod_p_matches_rational_rank(rows):
    r = Matrix(rows).rank()
    for p in CHECK_PRIMES:
        assert rank_mod_p(rows, p) == r


def test_sparse_matrix_roundtrip():
    rows = [[0, 2, 0], [1, 0, -3]]
    assert SparseMatrix.from_dense(rows).to_dense() == rows


ALL = [
    FamilySpec.nm(5, 2), FamilySpec.npm(4), FamilySpec.bnm(3, 3, 2), FamilySpec.fc(3), FamilySpec.fc(5),
    FamilySpec.nfc(3), FamilySpec.nfc(5), FamilySpec.bfc(1, 2), FamilySpec.bfc(2, 3), FamilySpec.nbfc(2, 3),
    FamilySpec.bfc(2, 4), FamilySpec.nbfc(2, 4), FamilySpec.nm(6, 2), FamilySpec.fc(1), FamilySpec.bfc(0, 2),
]


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.label)
def test_boundary_squared_zero(spec):
    assert chain_complex(spec).check_boundary_squared()


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.label)
def test_homology_is_predicted_wedge(spec):
    prof = reduced_homology(spec)
    p = predicted_spheres(spec)
    assert prof.torsion_free
    assert prof.betti == ({p.dimension: p.count} if p.count else {})
    assert prof.euler_characteristic() == chain_complex(spec).euler_characteristic() == -signed_euler_sum(spec)


def test_fc3_single_cell():
    cx = chain_complex(FamilySpec.fc(3))
    assert cx.f_vector() == {2: 1}
    assert cx.boundary_by_dim[2].count_nonzero() == 0


def test_reduced_complex_has_empty_face():
    cx = chain_complex(FamilySpec.npm(4))
    # two edges must share a vertex (15 - 3); three edges form a star or a triangle (4 + 4)
    assert cx.f_vector() == {-1: 1, 0: 6, 1: 12, 2: 8}


def test_nfc5_contains_full_two_skeleton():
    f = chain_complex(FamilySpec.nfc(5)).f_vector()
    assert f[0] == 10 and f[1] == 45 and f[2] == 120


def test_sign_convention():
    cx = chain_complex(simplex_poset(gr.complete_ground(3)))
    d2 = cx.boundary_by_dim[2].toarray().ravel().tolist()
    # 7 = e0 + e1 + e2 -> +(e1 e2) - (e0 e2) + (e0 e1), rows ordered 3, 5, 6
    assert d2 == [1, -1, 1]


def test_torsion_detected_on_projective_plane():
    # 6-vertex triangulation; mask bits stand for vertices
    tris = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
            (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6)]
    faces = set()
    for t in tris:
        for k in range(4):
            for sub in combinations(t, k):
                faces.add(sum(1 << (v - 1) for v in sub))
    poset = FacePoset.from_masks(gr.complete_ground(4), sorted(faces), label="RP2")
    prof = reduced_homology(poset)
    assert prof.betti == {}
    assert prof.torsion == {1: (2,)}


@pytest.mark.parametrize("spec,chi,signed", [
    (FamilySpec.npm(4), 1, -1), (FamilySpec.npm(6), -9, 9), (FamilySpec.bnm(2, 2, 2), -1, 1),
], ids=lambda x: getattr(x, "label", str(x)))
def test_euler_crosscheck(spec, chi, signed):
    rep = euler_crosscheck(spec)
    assert rep["agree"]
    assert rep["reduced_euler_from_faces"] == rep["reduced_euler_from_betti"] == chi
    assert rep["signed_euler_sum"] == signed


@pytest.mark.parametrize("n,fc,nfc", [(3, {"2": 1}, {"1": 1}), (5, {"5": 9}, {"4": 9})])
def test_suspension(n, fc, nfc):
    rep = suspension_check(n)
    assert rep["agree"]
    assert rep["fc"]["betti"] == fc and rep["nfc"]["betti"] == nfc


def test_suspension_domain():
    with pytest.raises(DomainError):
        suspension_check(1)
    with pytest.raises(DomainError):
        suspension_check(4)


@pytest.mark.parametrize("q,s", [(2, 4), (1, 3)])
def test_forman_bfc(q, s):
    g = gr.bipartite_ground(q, s)
    rep = verify(B.build_bfc_matching(q, s), simplex_poset(g))
    qfc = gr.q_factor_critical_array(g)
    rest = [c for c in rep.critical.tolist() if qfc[c]]
    dims = {}
    for c in rest:
        dims[bin(c).count("1") - 1] = dims.get(bin(c).count("1") - 1, 0) + 1
    assert reduced_homology(FamilySpec.bfc(q, s)).betti == dims
