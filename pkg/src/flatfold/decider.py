"""End-to-end decision pipeline for embedded-graph flat folding.

The stages run in a fixed order, and each failure maps to a structured
refusal: straight-angle counts are validated first, then line coordinates
are propagated (catching non-closing cycles), then each connected
component gets its unbounded face chosen, its clauses assembled, and its
flow solved.  A satisfying flow is converted to a mountain/valley witness
and re-verified by the independent checker before anything is reported;
containment of nested components is checked last, once every component
is known to fold on its own.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .csp import CspInstance, assemble
from .errors import (
    ClosureViolation,
    DiameterViolation,
    FlatCountViolation,
    InternalDegeneracy,
)
from .flow import solve
from .geometry import assign_coordinates, check_component_nesting, choose_exterior
from .model import Component, EmbeddedGraph, merge_straight_entries
from .oracle import verify_witness
from .verdict import SAT, UNSAT, Verdict


@dataclass(frozen=True)
class ComponentForest:
    """Connected components plus the declared containment between them."""

    components: tuple[Component, ...]
    parents: dict[int, tuple[int, int]]  # child id -> (parent id, parent face id)


def component_forest(graph: EmbeddedGraph) -> ComponentForest:
    comps = graph.components()
    parents: dict[int, tuple[int, int]] = {}
    for root_dart, parent_dart in graph.nesting_links:
        child = graph.component_of_vertex(graph.origin(root_dart))
        parent = graph.component_of_vertex(graph.origin(parent_dart))
        parents[child] = (parent, graph.face_of_dart(parent_dart))
    return ComponentForest(comps, parents)


def preprocess_flat_angles(
    graph: EmbeddedGraph,
) -> tuple[frozenset[int], dict[int, tuple], dict[str, int]]:
    """Validate straight-angle counts and fuse them out of the face cycles.

    Returns the straight angle ids, the merged cycle entries per face, and
    the mountain quota per vertex (zero where straight angles absorb the
    turn, one elsewhere).  Raises :class:`FlatCountViolation` when a
    vertex declares any number of straight angles other than zero or two.
    """
    flat_ids = graph.flat_angle_ids()
    targets: dict[str, int] = {}
    for v in sorted(graph.vertices):
        angles = graph.angles_at_vertex(v)
        if not angles:
            continue
        count = sum(1 for a in angles if a.id in flat_ids)
        if count not in (0, 2):
            raise FlatCountViolation(v, count)
        targets[v] = 0 if count else 1
    cycles = {
        f.id: merge_straight_entries(graph.face_cycle(f).entries, flat_ids)
        for f in graph.faces()
    }
    return flat_ids, cycles, targets


def exterior_faces(graph: EmbeddedGraph, coords: Mapping[str, Fraction]) -> dict[int, int | None]:
    """Unbounded face per component: the designated one where given, else
    the canonical full-diameter choice."""
    designated = graph.exterior_dart
    designated_face = graph.face_of_dart(designated) if designated is not None else None
    chosen: dict[int, int | None] = {}
    for comp in graph.components():
        if designated_face is not None and designated_face in comp.face_ids:
            chosen[comp.id] = designated_face
        else:
            chosen[comp.id] = choose_exterior(graph, coords, comp)
    return chosen


def assemble_components(
    graph: EmbeddedGraph,
    flat_angle_ids: frozenset[int],
    chosen_exterior: Mapping[int, int | None],
) -> list[tuple[Component, CspInstance]]:
    """One constraint instance per component with faces, in component
    order, sharing a single helper-id counter so variable names never
    collide across components."""
    out: list[tuple[Component, CspInstance]] = []
    fresh_base = len(graph.angles)
    fresh = fresh_base
    for comp in graph.components():
        if not comp.face_ids:
            continue
        csp = assemble(
            graph,
            chosen_exterior[comp.id],
            flat_angle_ids,
            faces=comp.face_ids,
            vertices=comp.vertices,
            fresh_start=fresh,
        )
        fresh += sum(1 for v in csp.var_red if v >= fresh_base)
        out.append((comp, csp))
    return out


def decide(graph: EmbeddedGraph) -> Verdict:
    """Decide flat foldability; SAT verdicts carry a verified witness.

    The witness maps every angle name to "M", "V", or "F", and the
    coordinate map places each vertex on the folding line.  UNSAT verdicts
    carry a reason object whose "kind" names the first stage that failed.
    Internal inconsistencies (a flow solution failing re-verification)
    raise instead of returning a wrong answer.
    """
    start = time.perf_counter()
    stats: dict = {"angles": len(graph.angles), "clauses": 0, "variables": 0, "flow_value": 0}

    def done(verdict: Verdict) -> Verdict:
        stats["elapsed"] = time.perf_counter() - start
        verdict.stats.update(stats)
        return verdict

    try:
        flat_ids, _cycles, _targets = preprocess_flat_angles(graph)
    except FlatCountViolation as fault:
        return done(
            Verdict(
                UNSAT,
                reason={
                    "kind": "flat_count_violation",
                    "vertex": fault.vertex,
                    "count": fault.count,
                },
            )
        )

    try:
        coords = assign_coordinates(graph, flat_ids)
    except ClosureViolation as fault:
        return done(
            Verdict(
                UNSAT,
                reason={"kind": "closure_violation", "edge": fault.edge_id},
            )
        )

    chosen_exterior = exterior_faces(graph, coords)

    assignment: dict[int, bool] = {}
    for comp, csp in assemble_components(graph, flat_ids, chosen_exterior):
        stats["clauses"] += len(csp.clauses)
        stats["variables"] += len(csp.var_red)
        outcome = solve(csp)
        if outcome.status == "totals_mismatch":
            return done(
                Verdict(
                    UNSAT,
                    reason={
                        "kind": "totals_mismatch",
                        "component": comp.vertices[0],
                        "red_total": csp.red_total,
                        "blue_total": csp.blue_total,
                    },
                )
            )
        stats["flow_value"] += outcome.value
        if outcome.status == "flow_shortfall":
            return done(
                Verdict(
                    UNSAT,
                    reason={
                        "kind": "flow_shortfall",
                        "component": comp.vertices[0],
                        "flow": outcome.value,
                        "target": outcome.target,
                    },
                )
            )
        if not csp.evaluate(outcome.assignment):
            raise InternalDegeneracy(
                "maximum flow reached its target but the extracted assignment "
                "violates a clause"
            )
        assignment.update(outcome.assignment)

    witness: dict[str, str] = {}
    for angle in graph.angles:
        if angle.id in flat_ids:
            witness[angle.name] = "F"
        else:
            witness[angle.name] = "M" if assignment.get(angle.id) else "V"

    problems = verify_witness(graph, witness, chosen_exterior)
    if problems:
        raise InternalDegeneracy(
            "constraint solution failed independent verification: "
            + "; ".join(problems)
        )

    try:
        check_component_nesting(graph, coords, chosen_exterior)
    except DiameterViolation as fault:
        return done(
            Verdict(
                UNSAT,
                reason={
                    "kind": "nesting_violation",
                    "component": fault.component,
                    "parent_face": fault.parent_face,
                    "child_diameter": str(fault.child_diameter),
                    "parent_diameter": str(fault.parent_diameter),
                },
            )
        )

    return done(Verdict(SAT, witness=witness, coords=dict(coords)))


def verify_result(graph: EmbeddedGraph, result: Mapping) -> list[str]:
    """Independently check a result document against its instance.

    SAT results are verified constructively: the witness must satisfy the
    per-vertex and per-face folding rules under the same exterior choices,
    any coordinates present must match re-derivation, and nested
    components must fit.  UNSAT results are checked by re-deciding.
    Returns human-readable problems; an empty list means the result holds.
    """
    status = result.get("status")
    if status not in (SAT, UNSAT):
        return [f"result status must be SAT or UNSAT, not {status!r}"]

    if status == UNSAT:
        verdict = decide(graph)
        if verdict.status != UNSAT:
            return ["result claims UNSAT but the instance folds"]
        return []

    witness = result.get("witness")
    if not isinstance(witness, Mapping):
        return ["SAT result carries no witness object"]

    problems: list[str] = []
    try:
        flat_ids, _, _ = preprocess_flat_angles(graph)
    except FlatCountViolation as fault:
        return [str(fault)]
    try:
        coords = assign_coordinates(graph, flat_ids)
    except ClosureViolation as fault:
        return [f"instance cannot fold: {fault}"]

    chosen_exterior = exterior_faces(graph, coords)
    problems.extend(verify_witness(graph, witness, chosen_exterior))

    claimed = result.get("coords")
    if isinstance(claimed, Mapping):
        for v, text in claimed.items():
            if v not in coords:
                problems.append(f"coordinates name unknown vertex {v!r}")
                continue
            try:
                x = Fraction(str(text))
            except (ValueError, ZeroDivisionError):
                problems.append(f"coordinate of {v!r} is not a rational")
                continue
            if x != coords[v]:
                problems.append(
                    f"coordinate of {v!r} is {text}, expected {coords[v]}"
                )

    try:
        check_component_nesting(graph, coords, chosen_exterior)
    except DiameterViolation as fault:
        problems.append(str(fault))
    return problems
