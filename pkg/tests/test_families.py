import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matchtopo import ground as gr
from matchtopo.errors import DomainError, ResourceError
from matchtopo.families import (
    FamilySpec,
    contains,
    enumerate_faces,
    face_masks,
    member_array,
    predicted_euler_sum,
    predicted_spheres,
    signed_euler_sum,
)
from matchtopo.graphs import BipartiteGraph, Graph
from matchtopo.oracles import all_matchings

SMALL = [
    FamilySpec.nm(4, 2), FamilySpec.nm(5, 2), FamilySpec.nm(5, 3), FamilySpec.npm(4),
    FamilySpec.bnm(2, 2, 2), FamilySpec.bnm(3, 2, 2), FamilySpec.bnm(2, 3, 3),
    FamilySpec.fc(3), FamilySpec.fc(5), FamilySpec.nfc(3), FamilySpec.nfc(5),
    FamilySpec.bfc(1, 2), FamilySpec.bfc(2, 3), FamilySpec.bfc(0, 2), FamilySpec.nbfc(1, 3), FamilySpec.nbfc(2, 3),
]


def brute_members(spec):
    g = spec.ground
    return {m for m in range(1 << g.num_edges) if contains(spec, g.to_object(m))}


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.label)
def test_faces_match_graph_level_membership(spec):
    members = brute_members(spec)
    faces = set(face_masks(spec).tolist())
    if spec.is_quotient:
        # cells of the quotient: exactly the members
        assert faces == members or (spec.gamma_is_void and faces == {0})
    else:
        assert faces == members


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.label)
def test_table_membership_matches_direct(spec):
    g = spec.ground
    masks = np.arange(1 << g.num_edges, dtype=np.int64)
    table = member_array(spec, masks)
    assert [bool(x) for x in table] == [contains(spec, g.to_object(int(m))) for m in masks]


@pytest.mark.parametrize("spec", [s for s in SMALL if not s.is_quotient], ids=lambda s: s.label)
def test_simplicial_families_are_down_closed(spec):
    faces = set(face_masks(spec).tolist())
    for f in faces:
        for i in range(spec.ground.num_edges):
            assert f & ~(1 << i) in faces


@pytest.mark.parametrize("spec", [s for s in SMALL if s.is_quotient and not s.gamma_is_void], ids=lambda s: s.label)
def test_quotient_cells_are_up_closed(spec):
    cells = set(face_masks(spec).tolist())
    for f in cells:
        for i in range(spec.ground.num_edges):
            assert f | (1 << i) in cells


def test_canonical_order():
    faces = face_masks(FamilySpec.npm(4)).tolist()
    keys = [(bin(f).count("1"), f) for f in faces]
    assert keys == sorted(keys)
    assert faces[0] == 0


def test_npm4_f_vector():
    # brute force over the 64 graphs on [4]
    counts = {}
    for m in range(64):
        g = Graph(4, m)
        if max(len(x) for x in all_matchings(g)) < 2:
            counts[g.num_edges] = counts.get(g.num_edges, 0) + 1
    faces = face_masks(FamilySpec.npm(4))
    got = dict(zip(*np.unique(gr.popcount(faces), return_counts=True)))
    assert {int(k): int(v) for k, v in got.items()} == counts


@pytest.mark.parametrize("spec,value", [
    (FamilySpec.npm(4), -1), (FamilySpec.npm(6), 9), (FamilySpec.nm(5, 2), -4), (FamilySpec.nm(7, 3), 64),
    (FamilySpec.bnm(2, 2, 2), 1), (FamilySpec.bnm(3, 3, 2), 4), (FamilySpec.bnm(4, 4, 3), 9),
    (FamilySpec.fc(5), 9), (FamilySpec.nfc(5), -9), (FamilySpec.bfc(2, 3), 1), (FamilySpec.nbfc(2, 3), -1),
], ids=lambda x: getattr(x, "label", str(x)))
def test_signed_euler_sums(spec, value):
    assert signed_euler_sum(spec) == value == predicted_euler_sum(spec)


def test_fc7_signed_sum():
    spec = FamilySpec.fc(7)
    assert len(face_masks(spec)) == 957971
    assert signed_euler_sum(spec) == predicted_euler_sum(spec) == -225


@pytest.mark.parametrize("spec,dim,count", [
    (FamilySpec.npm(6), 5, 9), (FamilySpec.nm(5, 2), 2, 4), (FamilySpec.nm(7, 3), 5, 64),
    (FamilySpec.bnm(3, 3, 2), 1, 4), (FamilySpec.fc(5), 5, 9), (FamilySpec.nfc(5), 4, 9),
    (FamilySpec.bfc(2, 4), 3, 3), (FamilySpec.nbfc(2, 4), 2, 3), (FamilySpec.fc(1), -1, 1),
], ids=lambda x: getattr(x, "label", str(x)))
def test_predictions(spec, dim, count):
    p = predicted_spheres(spec)
    assert (p.dimension, p.count) == (dim, count)


def test_npm_equals_nm_with_half():
    assert set(face_masks(FamilySpec.npm(6)).tolist()) == set(face_masks(FamilySpec.nm(6, 3)).tolist())
    assert predicted_spheres(FamilySpec.npm(6)).count == predicted_spheres(FamilySpec.nm(6, 3)).count


@pytest.mark.parametrize("build", [
    lambda: FamilySpec.npm(5), lambda: FamilySpec.fc(4), lambda: FamilySpec.nfc(1),
    lambda: FamilySpec.bfc(3, 3), lambda: FamilySpec.nbfc(0, 2), lambda: FamilySpec.nm(0, 1),
    lambda: FamilySpec.bnm(2, 2, 0),
])
def test_domain_errors(build):
    with pytest.raises(DomainError):
        build()


def test_resource_errors():
    with pytest.raises(ResourceError):
        face_masks(FamilySpec.nm(8, 2))
    with pytest.raises(ResourceError):
        face_masks(FamilySpec.nm(5, 2), face_cap=10)


def test_contains_rejects_wrong_ground():
    with pytest.raises(DomainError):
        contains(FamilySpec.nm(4, 2), Graph(5))
    with pytest.raises(DomainError):
        contains(FamilySpec.bnm(2, 2, 2), BipartiteGraph(2, 3))


def test_generic_family():
    triangle_free = FamilySpec.generic(
        lambda g: not any(g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)
                          for a in range(1, 5) for b in range(a + 1, 5) for c in range(b + 1, 5)),
        n=4, name="triangle-free")
    faces = set(face_masks(triangle_free).tolist())
    assert len(faces) == 41  # triangle-free graphs on 4 labelled vertices
    with pytest.raises(DomainError):
        FamilySpec.generic(lambda g: g.num_edges >= 1, n=3)
    with pytest.raises(DomainError):
        predicted_spheres(triangle_free)


def test_enumerate_faces_objects():
    objs = list(enumerate_faces(FamilySpec.bnm(2, 2, 2)))
    assert all(isinstance(o, BipartiteGraph) for o in objs)
    assert len(objs) == 9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([FamilySpec.nm(5, 2), FamilySpec.npm(6), FamilySpec.bnm(3, 3, 2), FamilySpec.nfc(5)]),
       st.data())
def test_random_faces_closed_under_deletion(spec, data):
    faces = face_masks(spec)
    f = int(data.draw(st.sampled_from(faces.tolist())))
    g = spec.ground.to_object(f)
    assert contains(spec, g)
    for i in range(spec.ground.num_edges):
        if f >> i & 1:
            assert contains(spec, spec.ground.to_object(f ^ (1 << i)))
