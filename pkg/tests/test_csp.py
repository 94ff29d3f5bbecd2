"""Whole-instance constraint assembly, text round trips, and validation."""

import pytest

from flatfold.csp import (
    CspInstance,
    assemble,
    dump_csp,
    generate_vertex_constraints,
    parse_csp,
    var_token,
)
from flatfold.errors import MalformedInput, StructureViolation
from flatfold.face_constraints import BLUE, RED, Clause
from flatfold.model import load_graph

from conftest import cycle_doc, cycle_graph, star_doc, two_squares_doc

SQUARE_DUMP = """csp vars=8 clauses=6 red=4 blue=4
red 1 a2,a4,a6,a0
red 3 a7,a5,a3,a1
blue 1 a0,a1
blue 1 a2,a3
blue 1 a4,a5
blue 1 a6,a7
"""


def test_var_token_splits_angles_from_fresh_variables():
    assert var_token(3, 8) == "a3"
    assert var_token(9, 8) == "f1"


def test_vertex_constraints_demand_one_mountain_each():
    g = load_graph(star_doc([1, 2, 3]))
    clauses = generate_vertex_constraints(g)
    assert [(c.color, c.vars, c.target) for c in clauses] == [
        (BLUE, (0, 1, 2), 1),
        (BLUE, (3,), 1),
        (BLUE, (4,), 1),
        (BLUE, (5,), 1),
    ]


def test_flat_marks_zero_the_remaining_vertex_target():
    g = load_graph(
        star_doc([1, 1, 2, 2], flat_angles=[("c", "e0", 0), ("c", "e2", 0)])
    )
    clauses = generate_vertex_constraints(g, flat_angle_ids=g.flat_angle_ids())
    center = clauses[0]
    assert (center.color, center.vars, center.target) == (BLUE, (1, 3), 0)


def test_square_assembly_matches_the_golden_dump():
    g = cycle_graph([1, 1, 1, 1])
    inst = assemble(g, exterior_face_id=1)
    assert dump_csp(inst) == SQUARE_DUMP
    assert inst.red_total == inst.blue_total == 4
    assert sorted(inst.variables) == list(range(8))
    assert inst.fresh_base == 8


def test_exterior_choice_swaps_the_face_targets():
    g = cycle_graph([1, 1, 1, 1])
    lines = dump_csp(assemble(g, exterior_face_id=0)).splitlines()
    assert lines[1] == "red 3 a2,a4,a6,a0"
    assert lines[2] == "red 1 a7,a5,a3,a1"


def test_assembly_is_deterministic():
    g = cycle_graph([2, 1, 2, 3])
    first = dump_csp(assemble(g, exterior_face_id=0))
    second = dump_csp(assemble(g, exterior_face_id=0))
    assert first == second


def test_component_scoped_assembly_uses_subsets():
    g = load_graph(two_squares_doc())
    comps = g.components()
    assert [c.id for c in comps] == [0, 1]
    inst = assemble(
        g,
        exterior_face_id=comps[1].face_ids[0],
        faces=comps[1].face_ids,
        vertices=comps[1].vertices,
        fresh_start=len(g.angles),
    )
    # only the second square's eight angles participate
    assert sorted(inst.variables) == list(range(8, 16))
    assert len(inst.clauses) == 6


def test_evaluate_accepts_exactly_the_folding_assignments():
    g = cycle_graph([1, 1, 1, 1])
    inst = assemble(g, exterior_face_id=1)
    good = {0: True, 1: False, 2: False, 3: True, 4: False, 5: True, 6: False, 7: True}
    assert inst.evaluate(good)
    flipped = dict(good)
    flipped[0] = False
    assert not inst.evaluate(flipped)


def test_evaluate_rejects_partial_assignments():
    g = cycle_graph([1, 1, 1, 1])
    inst = assemble(g, exterior_face_id=1)
    assert not inst.evaluate({0: True})


def test_round_trip_through_text_is_identity():
    g = cycle_graph([2, 1, 2, 3])
    inst = assemble(g, exterior_face_id=0)
    assert dump_csp(parse_csp(dump_csp(inst))) == dump_csp(inst)


def test_parse_rejects_malformed_dumps():
    bad = {
        "missing header": "red 1 a0\n",
        "bad header field": "csp vars=x clauses=1 red=1 blue=1\nred 1 a0\n",
        "missing field": "csp vars=1 clauses=1 red=1\nred 1 a0\n",
        "clause count": "csp vars=2 clauses=3 red=1 blue=1\nred 1 a0,a1\nblue 1 a0,a1\n",
        "red total": "csp vars=2 clauses=2 red=9 blue=1\nred 1 a0,a1\nblue 1 a0,a1\n",
        "token": "csp vars=2 clauses=2 red=1 blue=1\nred 1 a0,b1\nblue 1 a0\n",
        "target range": "csp vars=2 clauses=2 red=1 blue=1\nred 5 a0,a1\nblue 1 a0,a1\n",
        "color": "csp vars=2 clauses=2 red=1 blue=1\ngreen 1 a0,a1\nblue 1 a0,a1\n",
        "duplicate var": "csp vars=2 clauses=2 red=1 blue=1\nred 1 a0,a0\nblue 1 a0\n",
        "line shape": "csp vars=1 clauses=1 red=1 blue=0\nred 1\n",
    }
    for label, text in bad.items():
        with pytest.raises(MalformedInput):
            parse_csp(text)


def test_structure_requires_one_red_and_one_blue_per_variable():
    with pytest.raises(StructureViolation):
        CspInstance(
            (Clause(RED, (0,), 1), Clause(RED, (0,), 0), Clause(BLUE, (0,), 1)),
            fresh_base=1,
        )
    with pytest.raises(StructureViolation):
        CspInstance((Clause(RED, (0,), 1),), fresh_base=1)
    with pytest.raises(StructureViolation):
        CspInstance((Clause(BLUE, (0,), 1),), fresh_base=1)


def test_clause_views_pair_indices_with_clauses():
    g = cycle_graph([1, 1, 1, 1])
    inst = assemble(g, exterior_face_id=1)
    reds = inst.red_clauses()
    blues = inst.blue_clauses()
    assert [i for i, _c in reds] == [0, 1]
    assert [i for i, _c in blues] == [2, 3, 4, 5]
    assert all(c.color == RED for _i, c in reds)
    assert all(c.color == BLUE for _i, c in blues)
