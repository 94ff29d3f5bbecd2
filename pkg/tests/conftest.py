"""Shared builders for instance documents used across the test modules."""

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from flatfold.model import build_document, load_graph

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

DATA_DIR = Path(__file__).parent / "data"


def cycle_doc(lengths, exterior=None, flat_angles=(), prefix="v"):
    """Document for a single embedded cycle.

    ``lengths[i]`` is the length of the edge from vertex i to vertex i+1
    (mod n).  One edge gives a loop, two give a lens of parallel edges.
    """
    n = len(lengths)
    if n == 1:
        return build_document(
            [f"{prefix}0"],
            [("e0", f"{prefix}0", f"{prefix}0", lengths[0])],
            {f"{prefix}0": [("e0", 0), ("e0", 1)]},
            exterior=exterior,
            flat_angles=flat_angles,
        )
    if n == 2:
        return build_document(
            [f"{prefix}0", f"{prefix}1"],
            [
                ("e0", f"{prefix}0", f"{prefix}1", lengths[0]),
                ("e1", f"{prefix}0", f"{prefix}1", lengths[1]),
            ],
            {
                f"{prefix}0": [("e0", 0), ("e1", 0)],
                f"{prefix}1": [("e1", 1), ("e0", 1)],
            },
            exterior=exterior,
            flat_angles=flat_angles,
        )
    vertices = [f"{prefix}{i}" for i in range(n)]
    edges = [(f"e{i}", vertices[i], vertices[(i + 1) % n], lengths[i]) for i in range(n)]
    rotation = {
        vertices[i]: [(f"e{i}", 0), (f"e{(i - 1) % n}", 1)] for i in range(n)
    }
    return build_document(
        vertices, edges, rotation, exterior=exterior, flat_angles=flat_angles
    )


def cycle_graph(lengths, **kwargs):
    return load_graph(cycle_doc(lengths, **kwargs))


def star_doc(leaf_lengths, flat_angles=()):
    """A center vertex with one leaf per entry of ``leaf_lengths``."""
    center = "c"
    vertices = [center] + [f"x{i}" for i in range(len(leaf_lengths))]
    edges = [(f"e{i}", center, f"x{i}", l) for i, l in enumerate(leaf_lengths)]
    rotation = {center: [(f"e{i}", 0) for i in range(len(leaf_lengths))]}
    for i in range(len(leaf_lengths)):
        rotation[f"x{i}"] = [(f"e{i}", 1)]
    return build_document(vertices, edges, rotation, flat_angles=flat_angles)


def path_doc(lengths, flat_angles=()):
    """A path p0 - p1 - ... - pn."""
    n = len(lengths)
    vertices = [f"p{i}" for i in range(n + 1)]
    edges = [(f"e{i}", f"p{i}", f"p{i + 1}", lengths[i]) for i in range(n)]
    rotation = {vertices[0]: [("e0", 0)], vertices[n]: [(f"e{n - 1}", 1)]}
    for i in range(1, n):
        rotation[f"p{i}"] = [(f"e{i}", 0), (f"e{i - 1}", 1)]
    return build_document(vertices, edges, rotation, flat_angles=flat_angles)


def bowtie_doc():
    """Two unit triangles glued at the vertex w."""
    vertices = ["w", "p", "q", "r", "s"]
    edges = [
        ("f0", "w", "p", 1),
        ("f1", "p", "q", 1),
        ("f2", "q", "w", 1),
        ("g0", "w", "r", 1),
        ("g1", "r", "s", 1),
        ("g2", "s", "w", 1),
    ]
    rotation = {
        "w": [("f0", 0), ("f2", 1), ("g0", 0), ("g2", 1)],
        "p": [("f1", 0), ("f0", 1)],
        "q": [("f2", 0), ("f1", 1)],
        "r": [("g1", 0), ("g0", 1)],
        "s": [("g2", 0), ("g1", 1)],
    }
    return build_document(vertices, edges, rotation)


def theta_doc(middle_lengths):
    """Three paths u-m_i-v plus edge data to make extents differ.

    Each entry of ``middle_lengths`` is a pair (out, back): the path runs
    u --out--> m_i --back--> v.  All paths must displace u to v equally
    for the instance to close.
    """
    vertices = ["u", "v"] + [f"m{i}" for i in range(len(middle_lengths))]
    edges = []
    for i, (out, back) in enumerate(middle_lengths):
        edges.append((f"o{i}", "u", f"m{i}", out))
        edges.append((f"b{i}", f"m{i}", "v", back))
    rotation = {
        "u": [(f"o{i}", 0) for i in range(len(middle_lengths))],
        "v": [(f"b{i}", 1) for i in reversed(range(len(middle_lengths)))],
    }
    for i in range(len(middle_lengths)):
        rotation[f"m{i}"] = [(f"b{i}", 0), (f"o{i}", 1)]
    return build_document(vertices, edges, rotation)


def nested_squares_doc(parent_lengths, child_lengths, into_exterior=False):
    """A square nested inside one face of another square.

    The parent's face through dart (a0, 0) is designated exterior; the
    child is declared to live in the parent's other face unless
    ``into_exterior`` asks for the unconstrained placement.
    """
    parent = cycle_doc(parent_lengths, prefix="a")
    child = cycle_doc(child_lengths, prefix="b")
    child_edges = [dict(e, id="c" + e["id"]) for e in child["edges"]]
    child_rotation = {
        v: [{"edge": "c" + r["edge"], "end": r["end"]} for r in rot]
        for v, rot in child["rotation"].items()
    }
    doc = {
        "vertices": parent["vertices"] + child["vertices"],
        "edges": parent["edges"] + child_edges,
        "rotation": {**parent["rotation"], **child_rotation},
        "exterior": {"edge": "e0", "end": 0},
        "components": [
            {
                "root_dart": {"edge": "ce0", "end": 0},
                "parent_face": {"edge": "e0", "end": 0 if into_exterior else 1},
            }
        ],
    }
    return doc


def two_squares_doc(first=(1, 1, 1, 1), second=(1, 1, 1, 1)):
    """Two disjoint squares sharing one document, with no nesting links."""
    left = cycle_doc(first)
    right = cycle_doc(second, prefix="w")
    right_edges = [dict(e, id="g" + e["id"]) for e in right["edges"]]
    right_rotation = {
        v: [{"edge": "g" + r["edge"], "end": r["end"]} for r in rot]
        for v, rot in right["rotation"].items()
    }
    return {
        "vertices": left["vertices"] + right["vertices"],
        "edges": left["edges"] + right_edges,
        "rotation": {**left["rotation"], **right_rotation},
    }


def fixture_doc(name):
    with open(DATA_DIR / name, "r", encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture
def square_graph():
    return cycle_graph([1, 1, 1, 1])


@pytest.fixture
def two_leaves_graph():
    return load_graph(fixture_doc("square_two_leaves.json"))
