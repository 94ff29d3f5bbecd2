"""Rendering of an embedded instance and its clause system to a figure.

The drawing is a planar layout of the input graph (multi-edges and loops
are subdivided so the layout algorithm sees a simple graph) with the
clause structure overlaid: one red node per face clause, one blue node
per vertex or helper clause, and one edge per variable joining its red
and blue clause.  Layout quality is best-effort; the figure documents
structure, nothing downstream consumes it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .csp import CspInstance, var_token
from .face_constraints import RED
from .model import EmbeddedGraph

# Past this many clauses the per-node annotations stop carrying ids to keep
# rendering time sane on large instances.
_DETAIL_LIMIT = 2000


def _component_positions(graph: EmbeddedGraph) -> dict[str, tuple[float, float]]:
    """Planar coordinates for every vertex, plus midpoints for each edge.

    Each edge contributes two interior waypoints so parallel edges and
    loops stay visually separate; positions come from the documented
    rotation system when networkx accepts it and from a generic planar
    layout otherwise.
    """
    import networkx as nx

    positions: dict[str, tuple[float, float]] = {}
    offset = 0.0
    for comp in graph.components():
        rotations: dict[str, list[str]] = {v: [] for v in comp.vertices}
        waypoints: dict[str, tuple[str, str]] = {}
        for eid in comp.edge_ids:
            a = f"{eid}~a"
            b = f"{eid}~b"
            waypoints[eid] = (a, b)
            rotations[a] = [graph.edges[eid].ends[0], b]
            rotations[b] = [a, graph.edges[eid].ends[1]]
        for v in comp.vertices:
            for dart in graph.rotation[v]:
                a, b = waypoints[dart.edge]
                rotations[v].append(a if dart.end == 0 else b)

        nodes = list(rotations)
        pos: dict[str, tuple[float, float]] | None = None
        if len(nodes) == 1:
            pos = {nodes[0]: (0.0, 0.0)}
        else:
            try:
                emb = nx.PlanarEmbedding()
                emb.add_nodes_from(nodes)
                for node, nbrs in rotations.items():
                    prev = None
                    for w in nbrs:
                        if prev is None:
                            emb.add_half_edge_first(node, w)
                        else:
                            emb.add_half_edge(node, w, cw=prev)
                        prev = w
                emb.check_structure()
                raw = nx.combinatorial_embedding_to_pos(emb)
                pos = {n: (float(x), float(y)) for n, (x, y) in raw.items()}
            except Exception:
                simple = nx.Graph()
                simple.add_nodes_from(nodes)
                for node, nbrs in rotations.items():
                    for w in nbrs:
                        simple.add_edge(node, w)
                pos = nx.planar_layout(simple) if nx.check_planarity(simple)[0] else nx.spring_layout(simple, seed=0)
                pos = {n: (float(x), float(y)) for n, (x, y) in pos.items()}

        xs = [x for x, _ in pos.values()]
        ys = [y for _, y in pos.values()]
        span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        for n, (x, y) in pos.items():
            positions[n] = ((x - min(xs)) / span + offset, (y - min(ys)) / span)
        offset += 1.4
    return positions


def emit_diagram(
    graph: EmbeddedGraph, csp: CspInstance | None, path: str
) -> str:
    """Write the instance (and clause overlay, when given) as a figure.

    The output format follows the file extension; SVG keeps per-element
    ids (``clause-red-<i>``, ``clause-blue-<i>``, ``var-<token>``) for
    small instances.  Returns ``path``.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 7))
    ax.set_aspect("equal")
    ax.axis("off")

    if not graph.vertices:
        ax.set_title("empty instance")
        fig.savefig(path)
        plt.close(fig)
        return path

    positions = _component_positions(graph)

    for eid, edge in sorted(graph.edges.items()):
        chain = [edge.ends[0], f"{eid}~a", f"{eid}~b", edge.ends[1]]
        xs = [positions[n][0] for n in chain]
        ys = [positions[n][1] for n in chain]
        ax.plot(xs, ys, color="0.2", linewidth=1.2, zorder=1)

    vx = [positions[v][0] for v in graph.vertices]
    vy = [positions[v][1] for v in graph.vertices]
    ax.scatter(vx, vy, s=24, color="black", zorder=3)
    if len(graph.vertices) <= _DETAIL_LIMIT:
        for v in graph.vertices:
            x, y = positions[v]
            ax.annotate(v, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)

    if csp is not None:
        clause_pos = _clause_positions(graph, csp, positions)
        detailed = len(csp.clauses) <= _DETAIL_LIMIT
        for idx, clause in enumerate(csp.clauses):
            x, y = clause_pos[idx]
            if clause.color == RED:
                artist = ax.scatter([x], [y], s=60, marker="o", facecolor="#d62728",
                                    edgecolor="black", linewidth=0.5, zorder=4)
            else:
                artist = ax.scatter([x], [y], s=50, marker="s", facecolor="#1f77b4",
                                    edgecolor="black", linewidth=0.5, zorder=4)
            if detailed:
                artist.set_gid(f"clause-{clause.color}-{idx}")
                ax.annotate(str(clause.target), (x, y), textcoords="offset points",
                            xytext=(0, -2.5), fontsize=6, color="white",
                            ha="center", va="center", zorder=5)
        for var in sorted(csp.var_red):
            rx, ry = clause_pos[csp.var_red[var]]
            bx, by = clause_pos[csp.var_blue[var]]
            (line,) = ax.plot([rx, bx], [ry, by], color="0.55", linewidth=0.8,
                              linestyle=":", zorder=2)
            if detailed:
                line.set_gid(f"var-{var_token(var, csp.fresh_base)}")

    fig.savefig(path)
    plt.close(fig)
    return path


def _clause_positions(
    graph: EmbeddedGraph,
    csp: CspInstance,
    positions: Mapping[str, tuple[float, float]],
) -> dict[int, tuple[float, float]]:
    """Anchor clauses near the geometry they constrain.

    Angle variables anchor at their vertex; red clauses sit at the
    centroid of their anchored variables, helper blue clauses at their
    red partner, and vertex clauses at their vertex with a small offset.
    """
    vertex_of_angle = {a.id: a.vertex for a in graph.angles}
    out: dict[int, tuple[float, float]] = {}
    all_x = [p[0] for p in positions.values()]
    all_y = [p[1] for p in positions.values()]
    center = (sum(all_x) / len(all_x), sum(all_y) / len(all_y))

    for idx, clause in enumerate(csp.clauses):
        if clause.color == RED:
            anchors = [
                positions[vertex_of_angle[v]]
                for v in clause.vars
                if v in vertex_of_angle
            ]
            if anchors:
                x = sum(a[0] for a in anchors) / len(anchors)
                y = sum(a[1] for a in anchors) / len(anchors)
                out[idx] = (x, y + 0.02)
            else:
                out[idx] = center

    for idx, clause in enumerate(csp.clauses):
        if clause.color == RED:
            continue
        angle_vars = [v for v in clause.vars if v in vertex_of_angle]
        if angle_vars:
            x, y = positions[vertex_of_angle[angle_vars[0]]]
            out[idx] = (x - 0.03, y - 0.03)
        else:
            reds = {csp.var_red[v] for v in clause.vars if v in csp.var_red}
            anchors = [out[r] for r in sorted(reds) if r in out]
            if anchors:
                x = sum(a[0] for a in anchors) / len(anchors)
                y = sum(a[1] for a in anchors) / len(anchors)
                out[idx] = (x + 0.04, y - 0.04)
            else:
                out[idx] = center
    return out
