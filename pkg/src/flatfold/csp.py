"""Assembly of face and vertex clauses into one constraint instance.

Variables are angle ids, plus helper ids minted past the graph's angle
count by even-run eliminations.  Every variable ends up in exactly one
red clause (a face's folding discipline) and one blue clause (a vertex's
mountain quota, or the helper pair from its elimination step); the
instance is satisfiable iff some flat folding realizes the exterior
choice baked into the face clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InternalError, MalformedInput, StructureViolation
from .face_constraints import BLUE, RED, Clause, generate_face_constraints
from .model import EmbeddedGraph, FaceCycle, merge_straight_entries


def var_token(var: int, fresh_base: int) -> str:
    """Render a variable id as its dump token."""
    return f"a{var}" if var < fresh_base else f"f{var - fresh_base}"


@dataclass(frozen=True)
class CspInstance:
    """A validated clause list with its variable bookkeeping.

    ``fresh_base`` splits the variable space: ids below it are angle
    variables, ids at or above it are helpers.  Construction checks the
    one-red-one-blue discipline and the planarity bound on the
    clause-variable incidence graph, so a ``CspInstance`` in hand is
    structurally sound.
    """

    clauses: tuple[Clause, ...]
    fresh_base: int
    var_red: dict[int, int] = field(init=False, compare=False, repr=False)
    var_blue: dict[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        var_red: dict[int, int] = {}
        var_blue: dict[int, int] = {}
        for idx, clause in enumerate(self.clauses):
            clause.validate()
            seen = var_red if clause.color == RED else var_blue
            for var in clause.vars:
                if var in seen:
                    raise StructureViolation(
                        f"variable {var_token(var, self.fresh_base)} appears in "
                        f"two {clause.color} clauses"
                    )
                seen[var] = idx
        for var in var_red:
            if var not in var_blue:
                raise StructureViolation(
                    f"variable {var_token(var, self.fresh_base)} has a red "
                    "clause but no blue clause"
                )
        for var in var_blue:
            if var not in var_red:
                raise StructureViolation(
                    f"variable {var_token(var, self.fresh_base)} has a blue "
                    "clause but no red clause"
                )
        nodes = len(self.clauses) + len(var_red)
        if nodes >= 3 and 2 * len(var_red) > 3 * nodes - 6:
            raise StructureViolation(
                "clause-variable incidence graph exceeds the planar edge bound"
            )
        object.__setattr__(self, "var_red", var_red)
        object.__setattr__(self, "var_blue", var_blue)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(self.var_red))

    @property
    def red_total(self) -> int:
        return sum(c.target for c in self.clauses if c.color == RED)

    @property
    def blue_total(self) -> int:
        return sum(c.target for c in self.clauses if c.color == BLUE)

    def red_clauses(self) -> list[tuple[int, Clause]]:
        return [(i, c) for i, c in enumerate(self.clauses) if c.color == RED]

    def blue_clauses(self) -> list[tuple[int, Clause]]:
        return [(i, c) for i, c in enumerate(self.clauses) if c.color == BLUE]

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        """True iff ``assignment`` covers every variable and meets every
        clause target exactly."""
        for clause in self.clauses:
            have = 0
            for var in clause.vars:
                value = assignment.get(var)
                if value is None:
                    return False
                if value:
                    have += 1
            if have != clause.target:
                return False
        return True


def generate_vertex_constraints(
    graph: EmbeddedGraph,
    flat_angle_ids: frozenset[int] | None = None,
    vertices: Sequence[str] | None = None,
) -> list[Clause]:
    """One blue clause per vertex: exactly one mountain among its angles.

    A vertex whose straight angles already absorb the turn gets a zero
    target over its remaining angles instead, and drops out entirely when
    no angles remain.  Vertices are visited in sorted order and angles in
    rotation order, keeping clause lists reproducible.
    """
    flat_ids = graph.flat_angle_ids() if flat_angle_ids is None else flat_angle_ids
    scope = sorted(graph.vertices) if vertices is None else sorted(vertices)
    clauses: list[Clause] = []
    for v in scope:
        angles = graph.angles_at_vertex(v)
        if not angles:
            continue
        live = tuple(a.id for a in angles if a.id not in flat_ids)
        if len(live) == len(angles):
            clauses.append(Clause(BLUE, live, 1))
        elif live:
            clauses.append(Clause(BLUE, live, 0))
    return clauses


def assemble(
    graph: EmbeddedGraph,
    exterior_face_id: int | None,
    flat_angle_ids: frozenset[int] | None = None,
    faces: Sequence[int] | None = None,
    vertices: Sequence[str] | None = None,
    fresh_start: int | None = None,
) -> CspInstance:
    """Build the constraint instance for a graph or one of its components.

    Face clauses come first in face id order, then vertex clauses in
    vertex order, so two assemblies of the same scope are identical.
    ``faces`` and ``vertices`` restrict the scope to one component;
    ``fresh_start`` continues a helper-id counter shared across calls.
    Closure of every face in scope must already be known to hold.
    """
    flat_ids = graph.flat_angle_ids() if flat_angle_ids is None else flat_angle_ids
    fresh_base = len(graph.angles)
    fresh = fresh_base if fresh_start is None else fresh_start
    by_id = {f.id: f for f in graph.faces()}
    face_scope = sorted(by_id) if faces is None else sorted(faces)

    clauses: list[Clause] = []
    for fid in face_scope:
        cycle = graph.face_cycle(by_id[fid], is_exterior=(fid == exterior_face_id))
        entries = merge_straight_entries(cycle.entries, flat_ids)
        if not entries:
            continue
        trimmed = FaceCycle(fid, entries, cycle.is_exterior)
        face_clauses, used = generate_face_constraints(trimmed, fresh_start=fresh)
        fresh += used
        clauses.extend(face_clauses)
    clauses.extend(generate_vertex_constraints(graph, flat_ids, vertices))
    return CspInstance(tuple(clauses), fresh_base)


def dump_csp(csp: CspInstance) -> str:
    """Render an instance as delimited text, one clause per line.

    The header carries the variable and clause counts and both color
    totals; angle variables print as ``a<id>`` and helpers as ``f<k>``.
    The rendering is deterministic, so equal instances dump to equal
    bytes.
    """
    lines = [
        f"csp vars={len(csp.var_red)} clauses={len(csp.clauses)} "
        f"red={csp.red_total} blue={csp.blue_total}"
    ]
    base = csp.fresh_base
    for clause in csp.clauses:
        tokens = ",".join(var_token(v, base) for v in clause.vars)
        lines.append(f"{clause.color} {clause.target} {tokens}")
    return "\n".join(lines) + "\n"


def parse_csp(text: str) -> CspInstance:
    """Inverse of :func:`dump_csp`, validating structure as it reads."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("csp "):
        raise MalformedInput("constraint dump must start with a 'csp' header")
    header: dict[str, int] = {}
    for part in lines[0].split()[1:]:
        key, _, value = part.partition("=")
        if not value or not value.lstrip("-").isdigit():
            raise MalformedInput(f"bad header field {part!r}")
        header[key] = int(value)
    for key in ("vars", "clauses", "red", "blue"):
        if key not in header:
            raise MalformedInput(f"header is missing {key!r}")

    max_angle = -1
    raw: list[tuple[str, int, list[tuple[str, int]]]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise MalformedInput(f"line {lineno}: expected 'color target vars'")
        color, target_text, var_text = parts
        if color not in (RED, BLUE):
            raise MalformedInput(f"line {lineno}: unknown clause color {color!r}")
        if not target_text.isdigit():
            raise MalformedInput(f"line {lineno}: target must be a number")
        tokens: list[tuple[str, int]] = []
        for token in var_text.split(","):
            kind, digits = token[:1], token[1:]
            if kind not in ("a", "f") or not digits.isdigit():
                raise MalformedInput(f"line {lineno}: bad variable token {token!r}")
            num = int(digits)
            if kind == "a":
                max_angle = max(max_angle, num)
            tokens.append((kind, num))
        raw.append((color, int(target_text), tokens))

    fresh_base = max_angle + 1
    clauses = tuple(
        Clause(
            color,
            tuple(num if kind == "a" else fresh_base + num for kind, num in tokens),
            target,
        )
        for color, target, tokens in raw
    )
    try:
        csp = CspInstance(clauses, fresh_base)
    except InternalError as fault:
        raise MalformedInput(f"inconsistent constraint dump: {fault}") from fault
    if len(csp.clauses) != header["clauses"] or len(csp.var_red) != header["vars"]:
        raise MalformedInput("header counts disagree with the clause list")
    if csp.red_total != header["red"] or csp.blue_total != header["blue"]:
        raise MalformedInput("header totals disagree with the clause list")
    return csp
