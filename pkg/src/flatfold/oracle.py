"""Reference checkers, an exhaustive decider, and instance generators.

Everything in this module trades speed for independence: none of it shares
code with the production constraint pipeline, so the two can be tested
against each other.

Two checkers decide whether a single face cycle folds under a given
mountain/valley assignment.  ``crimp_check`` replays the local reduction
argument: repeatedly fold away a minimal run of equal-length edges,
shrinking the cycle until only equal lengths remain.  ``stack_check``
knows nothing about reductions; it enumerates vertical stacking orders of
the edges, draws each candidate as a rectilinear closed curve with
explicit fold bulges, and keeps the orders whose curve is simple.  The
realized assignment is read off the curve by point-in-polygon parity.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ClosureViolation, DiameterViolation, InternalDegeneracy, TooLarge
from .geometry import assign_coordinates, check_component_nesting, choose_exterior
from .model import EmbeddedGraph, build_document, load_graph, merge_straight_entries
from .verdict import SAT, UNSAT, Verdict


def _mv_bits(mv: Sequence[object]) -> list[bool]:
    bits: list[bool] = []
    for label in mv:
        if isinstance(label, str):
            if label == "M":
                bits.append(True)
            elif label == "V":
                bits.append(False)
            else:
                raise ValueError(f"angle label {label!r} must be 'M' or 'V'")
        else:
            bits.append(bool(label))
    return bits


@dataclass(frozen=True)
class AssignedCycle:
    """A face cycle together with a candidate mountain/valley assignment.

    ``mv[i]`` labels the angle crossed right after edge ``i``; True means
    mountain.
    """

    lengths: tuple[Fraction, ...]
    mv: tuple[bool, ...]
    is_exterior: bool = False

    def check(self) -> bool:
        return crimp_check(self.lengths, self.mv, self.is_exterior)


def _alternating_sum(lengths: Sequence) -> object:
    total = 0
    sign = 1
    for x in lengths:
        total = total + x if sign > 0 else total - x
        sign = -sign
    return total


def crimp_check(
    cycle: "AssignedCycle | Sequence",
    mv: Sequence[object] | None = None,
    is_exterior: bool = False,
    pick: Callable[[list[tuple[int, int]]], tuple[int, int]] | None = None,
) -> bool:
    """Decide a single assigned cycle by repeated crimp elimination.

    A run of edges shorter than both flanking edges can only fold by
    zig-zagging, which pins down the incident angles up to balance: for an
    odd run the mountains and valleys among the run's incident angles must
    tie, after which the run and both flanks fuse into one edge; for an
    even run they must differ by exactly one, and the run folds away
    leaving one angle of the majority type between the flanks.  Once all
    edges are equal the cycle closes iff valleys outnumber mountains by
    two (mountains by two for the unbounded face).

    Accepts either an :class:`AssignedCycle` or separate length and angle
    sequences.  ``pick`` selects which minimal run to eliminate when
    several exist; the answer does not depend on the choice, which tests
    exercise.
    """
    if isinstance(cycle, AssignedCycle):
        if mv is not None:
            raise ValueError("assigned cycle already carries its angles")
        lengths: Sequence = cycle.lengths
        mv = cycle.mv
        is_exterior = cycle.is_exterior
    else:
        lengths = cycle
        if mv is None:
            raise ValueError("cycle needs one angle per edge")
    edge_lengths = list(lengths)
    angles = _mv_bits(mv)
    if len(edge_lengths) != len(angles):
        raise ValueError("cycle needs one angle per edge")

    while True:
        n = len(edge_lengths)
        # Closure must hold at every level; the reductions preserve it.
        if n % 2 != 0:
            return False
        if _alternating_sum(edge_lengths) != 0:
            return False
        if n == 0:
            return True
        first = edge_lengths[0]
        if all(x == first for x in edge_lengths):
            mountains = sum(angles)
            valleys = n - mountains
            if is_exterior:
                return mountains - valleys == 2
            return valleys - mountains == 2

        runs: list[tuple[int, int]] = []
        for i in range(n):
            if edge_lengths[i - 1] == edge_lengths[i]:
                continue
            k = 1
            while edge_lengths[(i + k) % n] == edge_lengths[i]:
                k += 1
            if edge_lengths[i - 1] > edge_lengths[i] and edge_lengths[(i + k) % n] > edge_lengths[i]:
                runs.append((i, k))
        # Not all lengths are equal, so a shortest value exists and each of
        # its runs is flanked by longer edges.
        m, k = runs[0] if pick is None else pick(runs)

        incident = [(m - 1) % n] + [(m + j) % n for j in range(k)]
        mountain_count = sum(angles[j] for j in incident)
        if k % 2 == 1:
            # Odd run: incident mountains and valleys must tie, then the
            # run fuses with both flanks into a single longer edge.
            if 2 * mountain_count != k + 1:
                return False
            if n - k - 2 < 0:
                raise InternalDegeneracy(
                    "run elimination wrapped onto its own flank; "
                    "the cycle cannot have passed its closure check"
                )
            merged = (
                edge_lengths[(m - 1) % n]
                - edge_lengths[m]
                + edge_lengths[(m + k) % n]
            )
            kept = [(m + k + 1 + t) % n for t in range(n - k - 2)]
            edge_lengths = [edge_lengths[j] for j in kept] + [merged]
            angles = [angles[j] for j in kept] + [angles[(m + k) % n]]
        else:
            # Even run: one side wins by exactly one, and that majority
            # type survives as the single angle between the flanks.
            diff = 2 * mountain_count - (k + 1)
            if diff not in (1, -1):
                return False
            kept = [(m + k + t) % n for t in range(n - k)]
            edge_lengths = [edge_lengths[j] for j in kept]
            angles = [angles[j] for j in kept[:-1]] + [diff > 0]


# -- geometric stacking checker ---------------------------------------------


def _mask_for_layering(
    n: int, xs: list[int], approach: list[int], perm: Sequence[int]
) -> int | None:
    """Realized interior mountain mask for one stacking order, or None.

    ``perm[i]`` is the layer of edge ``i``.  Edges become horizontal sheets
    at y = 2*layer; the fold at vertex ``j`` becomes a rectilinear bulge
    past the vertex on its approach side, nested bulges getting widths by
    containment rank.  The drawing is simple iff the stacking is a valid
    flat fold: the only possible contacts are a fold enclosing foreign
    material (sheet through the bulge's wall) and two same-side folds at
    one spot with interleaved layer gaps, and both are tested exactly.
    """
    ys = [2 * perm[i] for i in range(n)]

    gaps: list[tuple[int, int]] = []
    for j in range(n):
        a, b = ys[j - 1], ys[j]
        gaps.append((a, b) if a < b else (b, a))

    groups: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for j in range(n):
        lo, hi = gaps[j]
        groups.setdefault((xs[j], approach[j]), []).append((lo, hi, j))

    bulge = [0] * n
    for group in groups.values():
        group.sort()
        open_tops: list[int] = []
        for lo, hi, _ in group:
            while open_tops and open_tops[-1] <= lo:
                open_tops.pop()
            if open_tops and open_tops[-1] < hi:
                return None  # two folds at one spot with crossing gaps
            open_tops.append(hi)
        by_width = sorted(group, key=lambda t: (t[1] - t[0], t[0]))
        for rank, (_, _, j) in enumerate(by_width):
            bulge[j] = 2 * (rank + 1)

    sheet_span: list[tuple[int, int]] = []
    for i in range(n):
        a, b = xs[i], xs[(i + 1) % n]
        sheet_span.append((a, b) if a < b else (b, a))

    for j in range(n):
        lo_j, hi_j = gaps[j]
        xj = xs[j]
        side = approach[j]
        for i in range(n):
            if not lo_j < ys[i] < hi_j:
                continue
            lo, hi = sheet_span[i]
            # Material strictly between the fold's layers must not extend
            # past the fold point on the fold's side.
            if lo < xj < hi or (xj == lo and side > 0) or (xj == hi and side < 0):
                return None

    mask = 0
    for j in range(n):
        lo_j, _ = gaps[j]
        qx = xs[j] + approach[j] * (bulge[j] - 1)
        qy = lo_j + 1
        crossings = 0
        for t in range(n):
            lo, hi = gaps[t]
            if lo < qy < hi and xs[t] + approach[t] * bulge[t] > qx:
                crossings += 1
        # The probe sits in the fold's pocket, which belongs to the face
        # that pinches shut there.  Bounded air is the cycle's inner face,
        # so an outside probe marks the inner-face angle as the wraparound.
        if crossings % 2 == 0:
            mask |= 1 << ((j - 1) % n)
    return mask


@lru_cache(maxsize=4096)
def _realizable_interior_masks(lengths: tuple[Fraction, ...]) -> frozenset[int]:
    n = len(lengths)
    if n % 2 != 0:
        return frozenset()
    positions: list[Fraction] = [Fraction(0)]
    for i, length in enumerate(lengths):
        step = Fraction(length)
        positions.append(positions[-1] + (step if i % 2 == 0 else -step))
    if positions[n] != positions[0]:
        return frozenset()

    scale = math.lcm(*(Fraction(l).denominator for l in lengths)) * 8 * n
    xs = [int(positions[j] * scale) for j in range(n)]
    approach = [1 if (j - 1) % n % 2 == 0 else -1 for j in range(n)]

    masks: set[int] = set()
    for perm in itertools.permutations(range(n)):
        if perm[0] > perm[-1]:
            continue  # the vertical mirror image realizes the same mask
        mask = _mask_for_layering(n, xs, approach, perm)
        if mask is not None:
            masks.add(mask)
    return frozenset(masks)


def stack_check(
    lengths: Sequence, mv: Sequence[object], is_exterior: bool = False
) -> bool:
    """Decide an assigned cycle by exhaustive stacking enumeration.

    Ground truth for small cycles (the stacking count is factorial in the
    edge count).  The same folded curve serves both faces of the cycle:
    reading it from the unbounded side flips every label, so the exterior
    query is the complemented interior one.
    """
    bits = _mv_bits(mv)
    n = len(bits)
    if n != len(lengths):
        raise ValueError("cycle needs one angle per edge")
    mask = 0
    for i, b in enumerate(bits):
        if b:
            mask |= 1 << i
    if is_exterior:
        mask = ~mask & ((1 << n) - 1)
    key = tuple(Fraction(l) for l in lengths)
    return mask in _realizable_interior_masks(key)


# -- witness verification ----------------------------------------------------


def merged_cycles(
    graph: EmbeddedGraph, flat_ids: frozenset[int]
) -> dict[int, tuple[tuple[Fraction, int], ...]]:
    """Face id to cycle entries with straight angles fused away."""
    cycles: dict[int, tuple[tuple[Fraction, int], ...]] = {}
    for face in graph.faces():
        entries = graph.face_cycle(face).entries
        cycles[face.id] = merge_straight_entries(entries, flat_ids)
    return cycles


def verify_witness(
    graph: EmbeddedGraph,
    witness: Mapping[str, str],
    exterior_by_component: Mapping[int, int | None],
) -> list[str]:
    """Check a claimed mountain/valley labeling; return the problems found.

    A sound witness labels every angle, marks exactly the declared straight
    angles "F", selects one mountain per vertex (none where straight angles
    absorb the turn), and folds every face cycle per the crimp criterion
    with the given face as each component's unbounded one.
    """
    problems: list[str] = []
    names = {a.name: a for a in graph.angles}
    missing = sorted(set(names) - set(witness))
    foreign = sorted(set(witness) - set(names))
    if missing:
        problems.append(f"witness misses angle(s) {missing[:5]}")
    if foreign:
        problems.append(f"witness labels unknown angle(s) {foreign[:5]}")
    if problems:
        return problems

    bad = sorted(name for name, v in witness.items() if v not in ("M", "V", "F"))
    if bad:
        problems.append(f"labels must be M, V or F; got {witness[bad[0]]!r} at {bad[0]}")
        return problems

    flat_ids = graph.flat_angle_ids()
    flat_names = {graph.angles[i].name for i in flat_ids}
    marked_flat = {name for name, v in witness.items() if v == "F"}
    if marked_flat != flat_names:
        problems.append(
            "straight marks disagree with the declared straight angles: "
            f"extra {sorted(marked_flat - flat_names)[:5]}, "
            f"missing {sorted(flat_names - marked_flat)[:5]}"
        )

    for v in sorted(graph.vertices):
        angles = graph.angles_at_vertex(v)
        if not angles:
            continue
        has_flat = any(a.id in flat_ids for a in angles)
        mountains = sum(1 for a in angles if witness[a.name] == "M")
        expected = 0 if has_flat else 1
        if mountains != expected:
            problems.append(
                f"vertex {v!r} has {mountains} mountain(s), expected {expected}"
            )

    cycles = merged_cycles(graph, flat_ids)
    for face in graph.faces():
        entries = cycles[face.id]
        if not entries:
            continue
        comp = graph.component_of_vertex(graph.origin(face.darts[0]))
        is_ext = exterior_by_component.get(comp) == face.id
        lengths = [length for length, _ in entries]
        bits = [witness[graph.angles[aid].name] == "M" for _, aid in entries]
        if not crimp_check(lengths, bits, is_ext):
            role = "unbounded" if is_ext else "bounded"
            problems.append(f"face {face.id} does not fold as the {role} face")
    return problems


# -- exhaustive reference decider --------------------------------------------


def _component_choice_lists(
    graph: EmbeddedGraph, vertices: Sequence[str], flat_ids: frozenset[int]
) -> list[list[tuple[int, ...]]]:
    """Per-vertex mountain choices; vertices with straight angles pick none."""
    choices: list[list[tuple[int, ...]]] = []
    for v in vertices:
        angles = graph.angles_at_vertex(v)
        live = [a.id for a in angles if a.id not in flat_ids]
        if not live or len(live) < len(angles):
            choices.append([()])
        else:
            choices.append([(aid,) for aid in live])
    return choices


def _search_component(
    graph: EmbeddedGraph,
    comp_vertices: Sequence[str],
    face_ids: Sequence[int],
    cycles: Mapping[int, tuple[tuple[Fraction, int], ...]],
    flat_ids: frozenset[int],
    exterior_candidates: Sequence[int],
) -> tuple[frozenset[int], int | None] | None:
    """First mountain set folding every face, with its unbounded face."""
    live_faces = [fid for fid in face_ids if cycles[fid]]
    if not live_faces:
        exterior = exterior_candidates[0] if exterior_candidates else None
        return frozenset(), exterior

    memo: dict[tuple[int, tuple[bool, ...], bool], bool] = {}

    def face_ok(fid: int, mountains: frozenset[int], as_exterior: bool) -> bool:
        entries = cycles[fid]
        bits = tuple(aid in mountains for _, aid in entries)
        key = (fid, bits, as_exterior)
        got = memo.get(key)
        if got is None:
            got = crimp_check([l for l, _ in entries], bits, as_exterior)
            memo[key] = got
        return got

    candidate_set = [fid for fid in exterior_candidates if fid in set(face_ids)]
    for combo in itertools.product(
        *_component_choice_lists(graph, comp_vertices, flat_ids)
    ):
        mountains = frozenset(aid for group in combo for aid in group)
        interior_failures = [
            fid for fid in live_faces if not face_ok(fid, mountains, False)
        ]
        if len(interior_failures) > 1:
            continue
        for fid in candidate_set:
            if interior_failures and interior_failures != [fid]:
                continue
            if cycles[fid] and not face_ok(fid, mountains, True):
                continue
            return mountains, fid
    return None


def brute_force_decide(graph: EmbeddedGraph, max_angles: int = 22) -> Verdict:
    """Decide foldability by enumerating every admissible mountain choice.

    Independent of the constraint pipeline: one mountain is picked per
    vertex (honoring straight angles), every face is tried as a component's
    unbounded face, and faces are checked by crimp elimination.  Refuses
    instances with more than ``max_angles`` foldable angles.
    """
    start = time.perf_counter()
    stats: dict = {"angles": len(graph.angles)}
    if len(graph.angles) > max_angles:
        raise TooLarge(
            f"{len(graph.angles)} angles exceed the exhaustive bound of {max_angles}"
        )

    def done(verdict: Verdict) -> Verdict:
        verdict.stats.update(stats)
        verdict.stats["elapsed"] = time.perf_counter() - start
        return verdict

    flat_ids = graph.flat_angle_ids()
    for v in sorted(graph.vertices):
        count = sum(1 for a in graph.angles_at_vertex(v) if a.id in flat_ids)
        if count not in (0, 2):
            return done(
                Verdict(
                    UNSAT,
                    reason={"kind": "flat_count_violation", "vertex": v, "count": count},
                )
            )

    try:
        coords = assign_coordinates(graph, flat_ids)
    except ClosureViolation as fault:
        return done(
            Verdict(UNSAT, reason={"kind": "closure_violation", "edge": fault.edge_id})
        )

    cycles = merged_cycles(graph, flat_ids)
    components = graph.components()
    designated = graph.exterior_dart
    designated_face = graph.face_of_dart(designated) if designated else None

    witness_mountains: set[int] = set()
    chosen_exterior: dict[int, int | None] = {}
    for comp in components:
        if designated_face is not None and designated_face in comp.face_ids:
            candidates: Sequence[int] = [designated_face]
        else:
            candidates = comp.face_ids
        found = _search_component(
            graph, comp.vertices, comp.face_ids, cycles, flat_ids, candidates
        )
        if found is None:
            return done(
                Verdict(
                    UNSAT,
                    reason={
                        "kind": "no_folding",
                        "component": comp.vertices[0],
                    },
                )
            )
        witness_mountains.update(found[0])
        chosen_exterior[comp.id] = found[1]

    # Containment comes last: every component folds on its own, but a
    # cycle hung inside a face must still fit inside that face's fold.
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

    witness = {}
    for angle in graph.angles:
        if angle.id in flat_ids:
            witness[angle.name] = "F"
        elif angle.id in witness_mountains:
            witness[angle.name] = "M"
        else:
            witness[angle.name] = "V"
    return done(Verdict(SAT, witness=witness, coords=coords))


def count_foldings(graph: EmbeddedGraph, max_angles: int = 22) -> int:
    """Number of distinct witnesses with each component's canonical exterior."""
    if len(graph.angles) > max_angles:
        raise TooLarge("too many angles to count exhaustively")
    flat_ids = graph.flat_angle_ids()
    for v in graph.vertices:
        count = sum(1 for a in graph.angles_at_vertex(v) if a.id in flat_ids)
        if count not in (0, 2):
            return 0
    try:
        coords = assign_coordinates(graph, flat_ids)
    except ClosureViolation:
        return 0
    cycles = merged_cycles(graph, flat_ids)
    designated = graph.exterior_dart
    designated_face = graph.face_of_dart(designated) if designated else None

    total = 1
    for comp in graph.components():
        if designated_face is not None and designated_face in comp.face_ids:
            exterior = designated_face
        else:
            exterior = choose_exterior(graph, coords, comp)
        comp_count = 0
        for combo in itertools.product(
            *_component_choice_lists(graph, comp.vertices, flat_ids)
        ):
            mountains = frozenset(aid for group in combo for aid in group)
            ok = True
            for fid in comp.face_ids:
                entries = cycles[fid]
                if not entries:
                    continue
                bits = [aid in mountains for _, aid in entries]
                if not crimp_check([l for l, _ in entries], bits, fid == exterior):
                    ok = False
                    break
            if ok:
                comp_count += 1
        total *= comp_count
    return total


# -- constraint evaluation helper for tests ----------------------------------


def extend_face_assignment(clauses, assignment: Mapping[int, bool]) -> dict[int, bool] | None:
    """Complete an angle assignment across a face's clause list, if possible.

    The clause list must be in generation order, where each clause has at
    most one variable not yet assigned (the helper variables are chained).
    Returns None when some clause cannot meet its target.
    """
    values = dict(assignment)
    for clause in clauses:
        unknown = [v for v in clause.vars if v not in values]
        have = sum(1 for v in clause.vars if values.get(v))
        if not unknown:
            if have != clause.target:
                return None
        elif len(unknown) == 1:
            need = clause.target - have
            if need not in (0, 1):
                return None
            values[unknown[0]] = bool(need)
        else:
            raise ValueError("clause list is not in generation order")
    return values


# -- instance generators ------------------------------------------------------


def grid_instance(width: int, height: int) -> dict:
    """Unit-length grid of ``width`` by ``height`` cells, all folds free."""
    if width < 1 or height < 1:
        raise ValueError("grid needs at least one cell in each direction")
    vertices = [f"v{x}_{y}" for y in range(height + 1) for x in range(width + 1)]
    edges = []
    for y in range(height + 1):
        for x in range(width):
            edges.append((f"r{x}_{y}", f"v{x}_{y}", f"v{x + 1}_{y}", 1))
    for y in range(height):
        for x in range(width + 1):
            edges.append((f"u{x}_{y}", f"v{x}_{y}", f"v{x}_{y + 1}", 1))
    rotation = {}
    for y in range(height + 1):
        for x in range(width + 1):
            rot = []
            if x < width:
                rot.append((f"r{x}_{y}", 0))  # east
            if y < height:
                rot.append((f"u{x}_{y}", 0))  # north
            if x > 0:
                rot.append((f"r{x - 1}_{y}", 1))  # west
            if y > 0:
                rot.append((f"u{x}_{y - 1}", 1))  # south
            rotation[f"v{x}_{y}"] = rot
    return build_document(vertices, edges, rotation)


class _Builder:
    """Accumulates a rotation system under random growth."""

    def __init__(self, rng: random.Random, prefix: str = ""):
        self.rng = rng
        self.prefix = prefix
        self.vertices: list[str] = []
        self.edges: list[tuple[str, str, str, int]] = []
        self.rotation: dict[str, list[tuple[str, int]]] = {}
        self._counter = 0

    def new_vertex(self) -> str:
        v = f"{self.prefix}n{len(self.vertices)}"
        self.vertices.append(v)
        self.rotation[v] = []
        return v

    def new_edge(self, a: str, b: str, length: int) -> str:
        eid = f"{self.prefix}e{self._counter}"
        self._counter += 1
        self.edges.append((eid, a, b, length))
        return eid

    def insert_dart(self, vertex: str, dart: tuple[str, int], position: int | None = None) -> None:
        rot = self.rotation[vertex]
        if position is None:
            position = self.rng.randrange(len(rot) + 1) if rot else 0
        rot.insert(position, dart)

    @property
    def angle_count(self) -> int:
        return 2 * len(self.edges)


def _zigzag_lengths(rng: random.Random, pairs: int) -> list[int]:
    """Lengths for a closed cycle: odd and even steps sum to the same total."""
    rights = [rng.randint(1, 4) for _ in range(pairs)]
    for _ in range(40):
        lefts = [rng.randint(1, 4) for _ in range(pairs)]
        if sum(lefts) == sum(rights):
            break
        if pairs > 1:
            slack = sum(rights) - sum(lefts[:-1])
            if 1 <= slack <= 6:
                lefts[-1] = slack
                break
    else:
        lefts = list(rights)
        rng.shuffle(lefts)
    out = []
    for r, l in zip(rights, lefts):
        out.extend([r, l])
    return out


def _add_cycle(builder: _Builder, lengths: Sequence[int], glue: str | None = None) -> list[str]:
    """Append a cycle; when ``glue`` is given, the cycle hangs off that vertex."""
    n = len(lengths)
    vs = [glue if glue is not None and i == 0 else builder.new_vertex() for i in range(n)]
    eids = [builder.new_edge(vs[i], vs[(i + 1) % n], lengths[i]) for i in range(n)]
    for i in range(n):
        v = vs[i]
        out_dart = (eids[i], 0)
        in_dart = (eids[(i - 1) % n], 1)
        if v == glue:
            # Both darts enter adjacently so the new cycle sits inside one face.
            pos = builder.rng.randrange(len(builder.rotation[v]) + 1) if builder.rotation[v] else 0
            builder.rotation[v].insert(pos, in_dart)
            builder.rotation[v].insert(pos, out_dart)
        else:
            builder.rotation[v] = [out_dart, in_dart]
    return vs


def _add_tree(builder: _Builder, edge_budget: int) -> list[str]:
    root = builder.new_vertex()
    vs = [root]
    for _ in range(edge_budget):
        parent = builder.rng.choice(vs)
        child = builder.new_vertex()
        eid = builder.new_edge(parent, child, builder.rng.randint(1, 5))
        builder.insert_dart(parent, (eid, 0))
        builder.rotation[child] = [(eid, 1)]
        vs.append(child)
    return vs


def _decorate(builder: _Builder, cycle_vertices: list[str], max_angles: int) -> None:
    rng = builder.rng
    for _ in range(rng.randint(0, 3)):
        if builder.angle_count + 2 > max_angles:
            return
        move = rng.random()
        if move < 0.4:
            # leaf
            v = rng.choice(cycle_vertices)
            leaf = builder.new_vertex()
            eid = builder.new_edge(v, leaf, rng.randint(1, 4))
            builder.insert_dart(v, (eid, 0))
            builder.rotation[leaf] = [(eid, 1)]
        elif move < 0.6:
            # parallel edge forming a lens with an existing one
            eid0, a, b, length = rng.choice(builder.edges)
            if a == b:
                continue
            eid = builder.new_edge(a, b, length if rng.random() < 0.7 else rng.randint(1, 4))
            pos_a = builder.rotation[a].index((eid0, 0)) if (eid0, 0) in builder.rotation[a] else None
            pos_b = builder.rotation[b].index((eid0, 1)) if (eid0, 1) in builder.rotation[b] else None
            if pos_a is None or pos_b is None:
                continue
            builder.rotation[a].insert(pos_a + 1, (eid, 0))
            builder.rotation[b].insert(pos_b, (eid, 1))
        elif move < 0.75:
            # loop: both darts adjacent, enclosing nothing
            v = rng.choice(cycle_vertices)
            eid = builder.new_edge(v, v, rng.randint(1, 3))
            pos = rng.randrange(len(builder.rotation[v]) + 1) if builder.rotation[v] else 0
            builder.rotation[v].insert(pos, (eid, 1))
            builder.rotation[v].insert(pos, (eid, 0))
        else:
            # hang a small cycle off a vertex
            if builder.angle_count + 8 > max_angles:
                continue
            glue = rng.choice(cycle_vertices)
            _add_cycle(builder, _zigzag_lengths(rng, 2), glue=glue)


def _pick_flats(rng: random.Random, doc: dict) -> None:
    """Mark straight angles on a loaded copy of ``doc``, mutating it."""
    graph = load_graph(doc)
    eligible = [v for v in graph.vertices if len(graph.rotation[v]) >= 2]
    if not eligible:
        return
    v = rng.choice(eligible)
    chosen = rng.sample(list(graph.angles_at_vertex(v)), 2)
    if rng.random() < 0.12:
        chosen = chosen[:1]  # deliberately invalid count
    doc["flat_angles"] = [
        {"vertex": a.vertex, "dart": {"edge": a.dart.edge, "end": a.dart.end}}
        for a in chosen
    ]


def random_instance(
    seed: int, max_angles: int = 18, mode: str = "general"
) -> EmbeddedGraph:
    """Deterministic random embedded graph for the given seed.

    Modes: "cycle" draws a single cycle whose closure holds about half the
    time, "closed" guarantees closure, "tree" yields tree components,
    "decorated" grows a closed cycle with leaves, lenses, loops and hung
    cycles, "multi" unions two components and sometimes nests one in the
    other, and "general" mixes all of the above.
    """
    rng = random.Random(seed)
    kind = mode
    if mode == "general":
        kind = rng.choice(["cycle", "closed", "tree", "decorated", "decorated", "multi"])

    builder = _Builder(rng)
    doc: dict | None = None

    if kind == "cycle":
        pairs = rng.randint(2, max(2, max_angles // 4))
        lengths = _zigzag_lengths(rng, pairs)
        if rng.random() < 0.5:
            lengths[rng.randrange(len(lengths))] += rng.randint(1, 3)
        _add_cycle(builder, lengths)
    elif kind == "closed":
        pairs = rng.randint(2, max(2, max_angles // 4))
        _add_cycle(builder, _zigzag_lengths(rng, pairs))
    elif kind == "tree":
        _add_tree(builder, rng.randint(1, max(1, max_angles // 2 - 1)))
    elif kind == "decorated":
        pairs = rng.randint(2, 3)
        vs = _add_cycle(builder, _zigzag_lengths(rng, pairs))
        _decorate(builder, vs, max_angles)
        if rng.random() < 0.35:
            idx = rng.randrange(len(builder.edges))
            eid, a, b, length = builder.edges[idx]
            builder.edges[idx] = (eid, a, b, length + 1)
    elif kind == "multi":
        first = _Builder(rng, prefix="a_")
        budget = max(4, max_angles // 2)
        _add_cycle(first, _zigzag_lengths(rng, rng.randint(2, max(2, budget // 4))))
        second = _Builder(rng, prefix="b_")
        if rng.random() < 0.5:
            _add_cycle(second, _zigzag_lengths(rng, 2))
        else:
            _add_tree(second, rng.randint(1, 3))
        components = []
        if rng.random() < 0.5 and first.edges and second.edges:
            components.append(
                ((second.edges[0][0], 0), (first.edges[0][0], rng.choice((0, 1))))
            )
        doc = build_document(
            first.vertices + second.vertices,
            first.edges + second.edges,
            {**first.rotation, **second.rotation},
            components=components,
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")

    if doc is None:
        doc = build_document(builder.vertices, builder.edges, dict(builder.rotation))
    if rng.random() < 0.25:
        _pick_flats(rng, doc)
    return load_graph(doc)
