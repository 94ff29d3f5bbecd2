"""Folded coordinates on a line.

A flat folding maps every vertex to a rational point on the x axis.  Around
a vertex, consecutive darts keep the same direction along the line when the
angle between them pinches shut or wraps around; only a straight angle
reverses it.  A face walk enters and then leaves every vertex it passes, so
its travel direction flips at each folded angle: once straight angles are
fused away the walk alternates rightward and leftward edges, which is where
the closure condition on face cycles comes from.

Coordinates are forced up to translation and reflection per component, so a
depth-first sweep either produces the unique normalized assignment (root at
zero, first dart pointing right) or hits an edge whose two endpoint
constraints disagree.  That first offending edge is reported; it certifies
that no folding exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ClosureViolation, DiameterViolation, EmptySet
from .model import Component, Dart, EmbeddedGraph, FaceCycle

CoordinateMap = dict[str, Fraction]


def assign_coordinates(
    graph: EmbeddedGraph, flat_angle_ids: frozenset[int] = frozenset()
) -> CoordinateMap:
    """Fold every component onto the line or raise :class:`ClosureViolation`.

    Expects straight angles to come in pairs at each vertex (validated by
    the caller); each component's root is its smallest vertex id, placed at
    zero with its first rotation dart pointing in the +x direction.
    """
    coords: CoordinateMap = {}
    direction: dict[Dart, int] = {}

    def spread_directions(vertex: str, known: Dart) -> None:
        # Walk the rotation once, flipping direction across straight angles.
        rot = graph.rotation[vertex]
        start = rot.index(known)
        deg = len(rot)
        flips = 0
        d = known
        for i in range(1, deg + 1):
            angle_id = graph.angle_id_after(d)
            nxt = rot[(start + i) % deg]
            sign = -1 if angle_id in flat_angle_ids else 1
            if sign < 0:
                flips += 1
            if i < deg:
                direction[nxt] = direction[d] * sign
            d = nxt
        # An odd number of straight angles would contradict itself going
        # around; the flat-count precondition rules it out.
        if flips % 2 != 0:
            raise AssertionError(
                f"vertex {vertex!r} has an odd number of straight angles"
            )

    for root in sorted(graph.vertices):
        if root in coords:
            continue
        coords[root] = Fraction(0)
        rot = graph.rotation[root]
        if not rot:
            continue
        direction[rot[0]] = 1
        spread_directions(root, rot[0])
        stack = [root]
        while stack:
            v = stack.pop()
            x = coords[v]
            for d in graph.rotation[v]:
                u = graph.head(d)
                reach = x + direction[d] * graph.length(d.edge)
                tw = d.twin()
                if u not in coords:
                    coords[u] = reach
                    direction[tw] = -direction[d]
                    spread_directions(u, tw)
                    stack.append(u)
                else:
                    if direction[tw] != -direction[d]:
                        raise ClosureViolation(
                            d.edge, "both endpoints traverse it in the same direction"
                        )
                    if coords[u] != reach:
                        raise ClosureViolation(
                            d.edge,
                            f"endpoint {u!r} sits at {coords[u]}, "
                            f"but the edge requires {reach}",
                        )
    return coords


@dataclass(frozen=True)
class ClosureFault:
    """Why a face cycle cannot close on the line."""

    kind: str  # "odd_count" or "nonzero_sum"
    value: Fraction | int


def face_closure_check(cycle: FaceCycle) -> ClosureFault | None:
    """Check that a face walk returns to its start.

    The walk alternates direction at every angle, so it closes exactly when
    the entry count is even and the alternating length sum is zero.  Returns
    None when the face passes.
    """
    entries = cycle.entries
    if len(entries) % 2 != 0:
        return ClosureFault("odd_count", len(entries))
    total = Fraction(0)
    sign = 1
    for length, _ in entries:
        total += sign * length
        sign = -sign
    if total != 0:
        return ClosureFault("nonzero_sum", total)
    return None


def folded_diameter(coords: Mapping[str, Fraction], vertices: Iterable[str]) -> Fraction:
    """Width of the folded image of ``vertices``: max minus min coordinate."""
    lo: Fraction | None = None
    hi: Fraction | None = None
    for v in vertices:
        x = coords[v]
        if lo is None or x < lo:
            lo = x
        if hi is None or x > hi:
            hi = x
    if lo is None or hi is None:
        raise EmptySet("folded diameter of an empty vertex set is undefined")
    return hi - lo


def choose_exterior(
    graph: EmbeddedGraph, coords: Mapping[str, Fraction], component: Component
) -> int | None:
    """Pick the component's unbounded face for constraint generation.

    In a folding, the unbounded face touches both ends of the component's
    folded extent, so its boundary spans the full diameter.  Among faces
    that do, the one with the lowest id is picked for determinism.  Some
    unfoldable components have no full-span face at all; the widest face
    is used then, which keeps the outcome sound because such instances
    fail their constraints regardless of the choice.
    """
    if not component.face_ids:
        return None
    comp_width = folded_diameter(coords, component.vertices)
    faces = graph.faces()
    best_id: int | None = None
    best_width: Fraction | None = None
    for fid in component.face_ids:
        width = folded_diameter(coords, graph.face_vertices(faces[fid]))
        if width == comp_width:
            return fid
        if best_width is None or width > best_width:
            best_width = width
            best_id = fid
    return best_id


def check_component_nesting(
    graph: EmbeddedGraph,
    coords: Mapping[str, Fraction],
    exterior_by_component: Mapping[int, int | None],
) -> None:
    """Verify each nested component fits inside its containing face.

    A component folded into a pocket of a face can be at most as wide as
    the face's folded span.  Nesting into a component's unbounded face is
    unconstrained.  Raises :class:`DiameterViolation` for the first link,
    in document order, that does not fit.
    """
    for root_dart, parent_dart in graph.nesting_links:
        child_comp = graph.components()[
            graph.component_of_vertex(graph.origin(root_dart))
        ]
        parent_face_id = graph.face_of_dart(parent_dart)
        parent_comp_id = graph.component_of_vertex(graph.origin(parent_dart))
        if exterior_by_component.get(parent_comp_id) == parent_face_id:
            continue
        child_width = folded_diameter(coords, child_comp.vertices)
        face = graph.faces()[parent_face_id]
        parent_width = folded_diameter(coords, graph.face_vertices(face))
        if child_width > parent_width:
            raise DiameterViolation(
                graph.origin(root_dart), parent_face_id, child_width, parent_width
            )
