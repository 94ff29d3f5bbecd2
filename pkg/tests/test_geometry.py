"""Coordinate assignment, closure checks, widths, and exterior selection."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from flatfold.errors import ClosureViolation, DiameterViolation, EmptySet
from flatfold.geometry import (
    assign_coordinates,
    check_component_nesting,
    choose_exterior,
    face_closure_check,
    folded_diameter,
)
from flatfold.model import load_graph
from flatfold.oracle import random_instance

from conftest import (
    cycle_doc,
    cycle_graph,
    fixture_doc,
    nested_squares_doc,
    path_doc,
    theta_doc,
)


def coords_of(lengths):
    g = load_graph(cycle_doc(lengths))
    return g, assign_coordinates(g)


def test_unit_square_coordinates_alternate():
    _g, coords = coords_of([1, 1, 1, 1])
    assert {v: str(x) for v, x in coords.items()} == {
        "v0": "0",
        "v1": "1",
        "v2": "0",
        "v3": "1",
    }


def test_uneven_cycle_coordinates():
    g, coords = coords_of([2, 1, 2, 3])
    assert {v: str(x) for v, x in coords.items()} == {
        "v0": "0",
        "v1": "2",
        "v2": "1",
        "v3": "3",
    }
    assert folded_diameter(coords, g.vertices) == 3


def test_nonclosing_cycle_reports_the_offending_edge():
    g = load_graph(cycle_doc([1, 2, 1, 2]))
    with pytest.raises(ClosureViolation) as info:
        assign_coordinates(g)
    assert info.value.edge_id == "e1"


def test_face_closure_check_classifies_faults():
    ok = cycle_graph([1, 1, 2, 2])
    assert face_closure_check(ok.face_cycle(ok.faces()[0])) is None

    unbalanced = cycle_graph([3, 1, 1, 1])
    fault = face_closure_check(unbalanced.face_cycle(unbalanced.faces()[0]))
    assert fault.kind == "nonzero_sum"
    assert fault.value == 2

    odd = cycle_graph([1, 1, 1])
    fault = face_closure_check(odd.face_cycle(odd.faces()[0]))
    assert fault.kind == "odd_count"
    assert fault.value == 3


def test_tree_faces_always_close():
    g = load_graph(path_doc([1, 2]))
    assert face_closure_check(g.face_cycle(g.faces()[0])) is None


def test_folded_diameter_edge_cases():
    assert folded_diameter({"a": Fraction(0)}, ("a",)) == 0
    with pytest.raises(EmptySet):
        folded_diameter({}, ())


def test_flat_angles_continue_straight():
    g = load_graph(path_doc([1, 2]))
    flats = frozenset(a.id for a in g.angles_at_vertex("p1"))
    coords = assign_coordinates(g, flats)
    assert {v: str(x) for v, x in coords.items()} == {
        "p0": "0",
        "p1": "1",
        "p2": "3",
    }
    # without the flat marks the second edge reflects back
    folded = assign_coordinates(g)
    assert folded["p2"] == Fraction(-1)


def test_choose_exterior_prefers_lowest_full_width_face():
    g = load_graph(cycle_doc([1, 1, 1, 1]))
    comp = g.components()[0]
    assert choose_exterior(g, assign_coordinates(g), comp) == 0

    # two of the three theta faces reach the full width; the lowest id wins
    gt = load_graph(theta_doc([(1, 1), (3, 3), (2, 2)]))
    ct = assign_coordinates(gt)
    assert choose_exterior(gt, ct, gt.components()[0]) == 0
    widths = [folded_diameter(ct, gt.face_vertices(f)) for f in gt.faces()]
    assert [str(w) for w in widths] == ["3", "2", "3"]


def test_choose_exterior_falls_back_to_the_widest_face():
    g = load_graph(fixture_doc("square_two_leaves.json"))
    coords = assign_coordinates(g)
    comp = g.components()[0]
    assert folded_diameter(coords, g.vertices) == 4
    widths = [folded_diameter(coords, g.face_vertices(f)) for f in g.faces()]
    assert [str(w) for w in widths] == ["3", "2"]
    # no face spans the whole component, so the widest one is chosen
    assert choose_exterior(g, coords, comp) == 0


def test_face_width_never_exceeds_component_width():
    for seed in range(40):
        g = random_instance(seed, mode="closed")
        try:
            coords = assign_coordinates(g)
        except ClosureViolation:
            continue
        for comp in g.components():
            total = folded_diameter(coords, comp.vertices)
            for fid in comp.face_ids:
                face = g.faces()[fid]
                assert folded_diameter(coords, g.face_vertices(face)) <= total


def test_nesting_accepts_containment_and_equality():
    for parent, child in (
        (([2] * 4), ([1] * 4)),
        (([2] * 4), ([2] * 4)),
    ):
        g = load_graph(nested_squares_doc(parent, child))
        coords = assign_coordinates(g)
        ext = {c.id: choose_exterior(g, coords, c) for c in g.components()}
        check_component_nesting(g, coords, ext)


def test_nesting_rejects_an_oversized_child():
    g = load_graph(nested_squares_doc([1] * 4, [2] * 4))
    coords = assign_coordinates(g)
    ext = {c.id: choose_exterior(g, coords, c) for c in g.components()}
    with pytest.raises(DiameterViolation) as info:
        check_component_nesting(g, coords, ext)
    err = info.value
    assert err.component == "b0"
    assert err.parent_face == 1
    assert (str(err.child_diameter), str(err.parent_diameter)) == ("2", "1")


def test_nesting_skips_links_into_the_exterior_face():
    g = load_graph(nested_squares_doc([1] * 4, [2] * 4, into_exterior=True))
    coords = assign_coordinates(g)
    ext = {c.id: choose_exterior(g, coords, c) for c in g.components()}
    check_component_nesting(g, coords, ext)


@given(st.lists(st.integers(min_value=1, max_value=5), min_size=2, max_size=10))
def test_cycle_closure_matches_coordinate_success(lengths):
    g = load_graph(cycle_doc(lengths))
    fault = face_closure_check(g.face_cycle(g.faces()[0]))
    try:
        coords = assign_coordinates(g)
        succeeded = True
    except ClosureViolation:
        succeeded = False
    assert succeeded == (fault is None)
    if succeeded:
        # every edge spans exactly its length once folded
        for eid, edge in g.edges.items():
            a, b = edge.ends
            assert abs(coords[a] - coords[b]) == g.length(eid)


def test_coordinates_cover_every_component():
    for seed in range(30):
        g = random_instance(seed, mode="multi")
        try:
            coords = assign_coordinates(g)
        except ClosureViolation:
            continue
        assert set(coords) == set(g.vertices)
        roots = {min(c.vertices) for c in g.components()}
        for r in roots:
            assert coords[r] == 0
