"""Embedded multigraphs with exact rational edge lengths.

The graph model is a rotation system: every edge contributes two darts
(edge id plus end index), and each vertex lists the darts leaving it in
counterclockwise order.  Faces are dart orbits of the traversal rule
"twin, then previous in rotation", which walks every interior face
counterclockwise with the face on the left of each dart.

Angles are the gaps between rotation-adjacent darts.  The angle named by a
dart ``d`` is the gap swept from ``d`` to its rotation successor, so angles
and darts are in bijection.  A degree-one vertex has a single full-turn
angle named by its only dart.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    MalformedInput,
    NonPlanarEmbedding,
    NonPositiveLength,
    UnknownVertex,
)


class Dart(NamedTuple):
    """One of the two directed half-edges of an edge.

    ``end`` selects which entry of the edge's ``ends`` pair the dart leaves
    from, so the dart ``(e, 0)`` points from ``ends[0]`` toward ``ends[1]``.
    """

    edge: str
    end: int

    def twin(self) -> "Dart":
        return Dart(self.edge, 1 - self.end)


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    length: Fraction


@dataclass(frozen=True)
class Angle:
    """The rotation gap following ``dart`` at ``vertex``.

    ``name`` is the stable external identifier ``vertex:edge:end``.
    """

    id: int
    vertex: str
    dart: Dart
    name: str


@dataclass(frozen=True)
class Face:
    id: int
    darts: tuple[Dart, ...]


@dataclass(frozen=True)
class FaceCycle:
    """Boundary walk of a face as alternating lengths and angle ids.

    Entry ``i`` pairs the length of the walk's edge ``i`` with the id of
    the angle crossed immediately after that edge, so the entry sequence
    is cyclic and has one angle per edge.
    """

    face: int
    entries: tuple[tuple[Fraction, int], ...]
    is_exterior: bool = False


@dataclass(frozen=True)
class Component:
    """A connected piece of the graph, identified by its sorted vertex set."""

    id: int
    vertices: tuple[str, ...]
    edge_ids: tuple[str, ...]
    face_ids: tuple[int, ...]


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def parse_length(value: object, context: str) -> Fraction:
    """Parse an exact rational length, rejecting floats outright."""
    if isinstance(value, bool):
        raise MalformedInput(f"{context}: length must be an integer or 'p/q' string")
    if isinstance(value, int):
        frac = Fraction(value)
    elif isinstance(value, str):
        if not _RATIONAL_RE.match(value.strip()):
            raise MalformedInput(
                f"{context}: {value!r} is not an exact rational (use 'p' or 'p/q')"
            )
        frac = Fraction(value.strip())
    else:
        raise MalformedInput(
            f"{context}: length must be an integer or 'p/q' string, got {type(value).__name__}"
        )
    if frac <= 0:
        raise NonPositiveLength(f"{context}: length {frac} is not positive")
    return frac


def format_length(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _parse_dart_ref(ref: object, context: str, edges: Mapping[str, Edge]) -> Dart:
    if not isinstance(ref, Mapping):
        raise MalformedInput(f"{context}: dart reference must be an object")
    extra = set(ref) - {"edge", "end"}
    if extra:
        raise MalformedInput(f"{context}: unknown dart fields {sorted(extra)}")
    edge = ref.get("edge")
    end = ref.get("end")
    if not isinstance(edge, str) or edge not in edges:
        raise MalformedInput(f"{context}: unknown edge {edge!r}")
    if end not in (0, 1) or isinstance(end, bool):
        raise MalformedInput(f"{context}: dart end must be 0 or 1, got {end!r}")
    return Dart(edge, end)


def _dart_ref(dart: Dart) -> dict:
    return {"edge": dart.edge, "end": dart.end}


class EmbeddedGraph:
    """An embedded planar multigraph with derived faces, angles and components.

    Instances are built through :func:`load_graph`; construction validates
    the rotation system (each dart present exactly once, at its origin) and
    the per-component Euler count, so downstream code never re-checks.
    """

    def __init__(
        self,
        vertices: Sequence[str],
        edges: Sequence[Edge],
        rotation: Mapping[str, Sequence[Dart]],
        exterior_dart: Dart | None = None,
        flat_angle_darts: Sequence[Dart] = (),
        nesting_links: Sequence[tuple[Dart, Dart]] = (),
    ):
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edges: dict[str, Edge] = {e.id: e for e in edges}
        self.rotation: dict[str, tuple[Dart, ...]] = {
            v: tuple(rotation.get(v, ())) for v in self.vertices
        }
        self.exterior_dart = exterior_dart
        self.flat_angle_darts: tuple[Dart, ...] = tuple(flat_angle_darts)
        self.nesting_links: tuple[tuple[Dart, Dart], ...] = tuple(nesting_links)

        self._origin: dict[Dart, str] = {}
        for e in edges:
            self._origin[Dart(e.id, 0)] = e.ends[0]
            self._origin[Dart(e.id, 1)] = e.ends[1]

        # Rotation successor and predecessor per dart, computed once.
        self._rot_next: dict[Dart, Dart] = {}
        self._rot_prev: dict[Dart, Dart] = {}
        for v in self.vertices:
            rot = self.rotation[v]
            deg = len(rot)
            for i, d in enumerate(rot):
                nxt = rot[(i + 1) % deg]
                self._rot_next[d] = nxt
                self._rot_prev[nxt] = d

        # Angles minted in sorted vertex order, rotation order within a vertex.
        self._angles: list[Angle] = []
        self._angle_of_dart: dict[Dart, int] = {}
        for v in sorted(self.vertices):
            for d in self.rotation[v]:
                aid = len(self._angles)
                name = f"{v}:{d.edge}:{d.end}"
                self._angles.append(Angle(aid, v, d, name))
                self._angle_of_dart[d] = aid

        self._faces: tuple[Face, ...] | None = None
        self._face_of_dart: dict[Dart, int] = {}
        self._components: tuple[Component, ...] | None = None

    # -- basic accessors -------------------------------------------------

    def origin(self, dart: Dart) -> str:
        return self._origin[dart]

    def head(self, dart: Dart) -> str:
        return self._origin[dart.twin()]

    def length(self, edge_id: str) -> Fraction:
        return self.edges[edge_id].length

    def next_in_rotation(self, dart: Dart) -> Dart:
        return self._rot_next[dart]

    def prev_in_rotation(self, dart: Dart) -> Dart:
        return self._rot_prev[dart]

    def next_face_dart(self, dart: Dart) -> Dart:
        """Successor along the face boundary keeping the face on the left."""
        return self._rot_prev[dart.twin()]

    @property
    def angles(self) -> Sequence[Angle]:
        return self._angles

    def angle_after(self, dart: Dart) -> Angle:
        return self._angles[self._angle_of_dart[dart]]

    def angle_id_after(self, dart: Dart) -> int:
        return self._angle_of_dart[dart]

    def angles_at_vertex(self, vertex: str) -> tuple[Angle, ...]:
        if vertex not in self.rotation:
            raise UnknownVertex(f"no vertex {vertex!r}")
        return tuple(self._angles[self._angle_of_dart[d]] for d in self.rotation[vertex])

    def flat_angle_ids(self) -> frozenset[int]:
        return frozenset(self._angle_of_dart[d] for d in self.flat_angle_darts)

    # -- faces -----------------------------------------------------------

    def faces(self) -> tuple[Face, ...]:
        """All dart orbits under the face traversal rule, in first-dart order.

        Darts are seeded in minted angle order (sorted vertices, rotation
        order within each), so face ids are stable across runs.
        """
        if self._faces is None:
            faces: list[Face] = []
            seen: set[Dart] = set()
            for angle in self._angles:
                d0 = angle.dart
                if d0 in seen:
                    continue
                orbit: list[Dart] = []
                d = d0
                while True:
                    orbit.append(d)
                    seen.add(d)
                    self._face_of_dart[d] = len(faces)
                    d = self.next_face_dart(d)
                    if d == d0:
                        break
                faces.append(Face(len(faces), tuple(orbit)))
            self._faces = tuple(faces)
        return self._faces

    def face_of_dart(self, dart: Dart) -> int:
        self.faces()
        return self._face_of_dart[dart]

    def face_vertices(self, face: Face) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self._origin[d] for d in face.darts))

    def face_cycle(self, face: Face, is_exterior: bool = False) -> FaceCycle:
        entries = []
        darts = face.darts
        n = len(darts)
        for i, d in enumerate(darts):
            following = darts[(i + 1) % n]
            entries.append((self.edges[d.edge].length, self._angle_of_dart[following]))
        return FaceCycle(face.id, tuple(entries), is_exterior)

    # -- components ------------------------------------------------------

    def components(self) -> tuple[Component, ...]:
        """Connected components, ordered by their smallest vertex id."""
        if self._components is not None:
            return self._components
        parent: dict[str, str] = {v: v for v in self.vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges.values():
            ra, rb = find(e.ends[0]), find(e.ends[1])
            if ra != rb:
                parent[ra] = rb

        groups: dict[str, list[str]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        ordered = sorted(groups.values(), key=lambda vs: min(vs))
        index_of: dict[str, int] = {}
        for idx, vs in enumerate(ordered):
            for v in vs:
                index_of[v] = idx

        edge_ids: list[list[str]] = [[] for _ in ordered]
        for eid in sorted(self.edges):
            edge_ids[index_of[self.edges[eid].ends[0]]].append(eid)
        face_ids: list[list[int]] = [[] for _ in ordered]
        for f in self.faces():
            face_ids[index_of[self._origin[f.darts[0]]]].append(f.id)

        self._components = tuple(
            Component(i, tuple(sorted(vs)), tuple(edge_ids[i]), tuple(face_ids[i]))
            for i, vs in enumerate(ordered)
        )
        return self._components

    def component_of_vertex(self, vertex: str) -> int:
        for comp in self.components():
            if vertex in comp.vertices:
                return comp.id
        raise UnknownVertex(f"no vertex {vertex!r}")

    # -- serialization ---------------------------------------------------

    def to_document(self) -> dict:
        doc: dict = {
            "vertices": list(self.vertices),
            "edges": [
                {
                    "id": e.id,
                    "ends": list(e.ends),
                    "length": format_length(e.length),
                }
                for e in self.edges.values()
            ],
            "rotation": {
                v: [_dart_ref(d) for d in rot] for v, rot in self.rotation.items()
            },
        }
        if self.exterior_dart is not None:
            doc["exterior"] = _dart_ref(self.exterior_dart)
        if self.flat_angle_darts:
            doc["flat_angles"] = [
                {"vertex": self._origin[d], "dart": _dart_ref(d)}
                for d in self.flat_angle_darts
            ]
        if self.nesting_links:
            doc["components"] = [
                {"root_dart": _dart_ref(r), "parent_face": _dart_ref(p)}
                for r, p in self.nesting_links
            ]
        return doc


def merge_straight_entries(
    entries: Sequence[tuple[Fraction, int]], flat_ids: frozenset[int]
) -> tuple[tuple[Fraction, int], ...]:
    """Fuse face-cycle entries across straight angles.

    An entry whose angle is straight contributes its length to the next
    entry around the cycle; the straight angle itself disappears.  A cycle
    whose angles are all straight fuses away entirely.
    """
    if not flat_ids:
        return tuple(entries)
    start = next((i for i, (_, a) in enumerate(entries) if a not in flat_ids), None)
    if start is None:
        return ()
    n = len(entries)
    merged: list[tuple[Fraction, int]] = []
    carry = Fraction(0)
    for k in range(1, n + 1):
        length, angle = entries[(start + k) % n]
        if angle in flat_ids:
            carry += length
        else:
            merged.append((carry + length, angle))
            carry = Fraction(0)
    return tuple(merged)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise MalformedInput(message)


def load_graph(document: object) -> EmbeddedGraph:
    """Validate an instance document and build the embedded graph.

    Checks performed here, in order: schema shape, vertex and edge tables,
    exact-positive lengths, the rotation system (every dart listed exactly
    once, at the vertex it leaves), optional exterior/straight-angle/nesting
    references, and finally the Euler count V - E + F = 2 on every component
    that has at least one edge.
    """
    _require(isinstance(document, Mapping), "instance document must be an object")
    assert isinstance(document, Mapping)
    known = {"vertices", "edges", "rotation", "exterior", "flat_angles", "components"}
    extra = set(document) - known
    _require(not extra, f"unknown top-level fields {sorted(extra)}")

    raw_vertices = document.get("vertices")
    _require(isinstance(raw_vertices, list), "'vertices' must be a list of ids")
    vertices: list[str] = []
    for v in raw_vertices:
        _require(isinstance(v, str) and v != "", f"vertex id {v!r} must be a non-empty string")
        vertices.append(v)
    _require(len(set(vertices)) == len(vertices), "duplicate vertex ids")
    vertex_set = set(vertices)

    raw_edges = document.get("edges", [])
    _require(isinstance(raw_edges, list), "'edges' must be a list")
    edges: list[Edge] = []
    for item in raw_edges:
        _require(isinstance(item, Mapping), "each edge must be an object")
        bad = set(item) - {"id", "ends", "length"}
        _require(not bad, f"edge has unknown fields {sorted(bad)}")
        eid = item.get("id")
        _require(isinstance(eid, str) and eid != "", f"edge id {eid!r} must be a non-empty string")
        ends = item.get("ends")
        _require(
            isinstance(ends, list) and len(ends) == 2,
            f"edge {eid!r}: 'ends' must name exactly two vertices",
        )
        for v in ends:
            if v not in vertex_set:
                raise UnknownVertex(f"edge {eid!r} references unknown vertex {v!r}")
        length = parse_length(item.get("length"), f"edge {eid!r}")
        edges.append(Edge(eid, (ends[0], ends[1]), length))
    edge_ids = [e.id for e in edges]
    _require(len(set(edge_ids)) == len(edge_ids), "duplicate edge ids")
    edge_map = {e.id: e for e in edges}

    raw_rotation = document.get("rotation", {})
    _require(isinstance(raw_rotation, Mapping), "'rotation' must be an object")
    for v in raw_rotation:
        if v not in vertex_set:
            raise UnknownVertex(f"rotation lists unknown vertex {v!r}")

    expected: dict[str, set[Dart]] = {v: set() for v in vertices}
    for e in edges:
        expected[e.ends[0]].add(Dart(e.id, 0))
        expected[e.ends[1]].add(Dart(e.id, 1))

    rotation: dict[str, list[Dart]] = {}
    seen_darts: set[Dart] = set()
    for v in vertices:
        raw = raw_rotation.get(v, [])
        _require(isinstance(raw, list), f"rotation at {v!r} must be a list")
        rot: list[Dart] = []
        for ref in raw:
            d = _parse_dart_ref(ref, f"rotation at {v!r}", edge_map)
            origin = edge_map[d.edge].ends[d.end]
            _require(
                origin == v,
                f"rotation at {v!r} lists dart {d.edge}:{d.end}, which leaves {origin!r}",
            )
            _require(d not in seen_darts, f"dart {d.edge}:{d.end} appears twice")
            seen_darts.add(d)
            rot.append(d)
        missing = expected[v] - set(rot)
        _require(
            not missing,
            f"rotation at {v!r} is missing dart(s) "
            + ", ".join(sorted(f"{d.edge}:{d.end}" for d in missing)),
        )
        rotation[v] = rot

    exterior_dart = None
    if "exterior" in document:
        exterior_dart = _parse_dart_ref(document["exterior"], "'exterior'", edge_map)

    flat_darts: list[Dart] = []
    if "flat_angles" in document:
        raw_flats = document["flat_angles"]
        _require(isinstance(raw_flats, list), "'flat_angles' must be a list")
        for item in raw_flats:
            _require(isinstance(item, Mapping), "each flat angle must be an object")
            bad = set(item) - {"vertex", "dart"}
            _require(not bad, f"flat angle has unknown fields {sorted(bad)}")
            v = item.get("vertex")
            _require(v in vertex_set, f"flat angle names unknown vertex {v!r}")
            d = _parse_dart_ref(item.get("dart"), f"flat angle at {v!r}", edge_map)
            origin = edge_map[d.edge].ends[d.end]
            _require(
                origin == v,
                f"flat angle at {v!r} names dart {d.edge}:{d.end}, which leaves {origin!r}",
            )
            _require(d not in flat_darts, f"flat angle {d.edge}:{d.end} listed twice")
            flat_darts.append(d)

    links: list[tuple[Dart, Dart]] = []
    if "components" in document:
        raw_links = document["components"]
        _require(isinstance(raw_links, list), "'components' must be a list")
        for item in raw_links:
            _require(isinstance(item, Mapping), "each component link must be an object")
            bad = set(item) - {"root_dart", "parent_face"}
            _require(not bad, f"component link has unknown fields {sorted(bad)}")
            root = _parse_dart_ref(item.get("root_dart"), "component root_dart", edge_map)
            parent = _parse_dart_ref(item.get("parent_face"), "component parent_face", edge_map)
            links.append((root, parent))

    graph = EmbeddedGraph(vertices, edges, rotation, exterior_dart, tuple(flat_darts), tuple(links))

    # Euler count per component; isolated vertices have no faces and are exempt.
    comps = graph.components()
    for comp in comps:
        if not comp.edge_ids:
            continue
        v_count = len(comp.vertices)
        e_count = len(comp.edge_ids)
        f_count = len(comp.face_ids)
        if v_count - e_count + f_count != 2:
            raise NonPlanarEmbedding(
                f"component containing {comp.vertices[0]!r}: "
                f"V - E + F = {v_count} - {e_count} + {f_count} != 2; "
                "the rotation system does not describe a planar embedding"
            )

    # Nesting links must form a forest over distinct components.
    parent_of: dict[int, int] = {}
    for root, parent in links:
        child_comp = graph.component_of_vertex(graph.origin(root))
        parent_comp = graph.component_of_vertex(graph.origin(parent))
        _require(
            child_comp != parent_comp,
            "component link nests a component inside itself",
        )
        _require(
            child_comp not in parent_of,
            "component has more than one containing face",
        )
        parent_of[child_comp] = parent_comp
    for start in parent_of:
        slow = start
        hops = 0
        while slow in parent_of:
            slow = parent_of[slow]
            hops += 1
            _require(hops <= len(parent_of), "component nesting links form a cycle")

    return graph


def build_document(
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str, str, object]],
    rotation: Mapping[str, Sequence[tuple[str, int]]],
    exterior: tuple[str, int] | None = None,
    flat_angles: Sequence[tuple[str, str, int]] = (),
    components: Sequence[tuple[tuple[str, int], tuple[str, int]]] = (),
) -> dict:
    """Convenience assembler for instance documents in tests and generators.

    ``edges`` rows are (id, end0, end1, length); rotation entries and dart
    references are (edge, end) pairs; flat angles are (vertex, edge, end).
    """
    doc: dict = {
        "vertices": list(vertices),
        "edges": [
            {"id": eid, "ends": [a, b], "length": length}
            for eid, a, b, length in edges
        ],
        "rotation": {
            v: [{"edge": e, "end": end} for e, end in rot]
            for v, rot in rotation.items()
        },
    }
    if exterior is not None:
        doc["exterior"] = {"edge": exterior[0], "end": exterior[1]}
    if flat_angles:
        doc["flat_angles"] = [
            {"vertex": v, "dart": {"edge": e, "end": end}} for v, e, end in flat_angles
        ]
    if components:
        doc["components"] = [
            {
                "root_dart": {"edge": r[0], "end": r[1]},
                "parent_face": {"edge": p[0], "end": p[1]},
            }
            for r, p in components
        ]
    return doc
