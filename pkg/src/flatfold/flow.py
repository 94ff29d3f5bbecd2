"""Reduction of assembled constraints to maximum flow, and its solver.

Each red clause turns into a personal source wired to a red clause node
with the clause target as capacity; each blue clause into a blue clause
node wired to a personal sink the same way.  Every variable becomes a
unit arc from its red clause node to its blue clause node.  Pushing the
full red total through the network is possible iff the clause system is
satisfiable, and the saturated unit arcs read off a satisfying
assignment directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .csp import CspInstance, var_token
from .face_constraints import RED


@dataclass
class FlowNetwork:
    """A capacitated network plus provenance back to the clause system.

    Nodes: personal sources, then red clause nodes, then blue clause
    nodes, then personal sinks; ``node_count`` is twice the clause count.
    Arcs are stored as parallel arrays in construction order (source
    arcs, variable arcs by variable id, sink arcs), which fixes the
    traversal order of the solver and therefore the witness it finds.
    """

    node_count: int
    tail: list[int]
    head: list[int]
    cap: list[int]
    source_nodes: list[int]
    sink_nodes: list[int]
    var_arc: dict[int, int]
    arc_label: list[str]
    target: int
    fresh_base: int = 0

    def arcs(self) -> list[tuple[int, int, int, str]]:
        return list(zip(self.tail, self.head, self.cap, self.arc_label))


def csp_to_flow(csp: CspInstance) -> FlowNetwork:
    """Build the clause network; requires equal red and blue totals."""
    reds = csp.red_clauses()
    blues = csp.blue_clauses()
    n_red, n_blue = len(reds), len(blues)
    red_node = {idx: n_red + i for i, (idx, _) in enumerate(reds)}
    blue_node = {idx: 2 * n_red + j for j, (idx, _) in enumerate(blues)}
    first_sink = 2 * n_red + n_blue

    net = FlowNetwork(
        node_count=2 * n_red + 2 * n_blue,
        tail=[],
        head=[],
        cap=[],
        source_nodes=list(range(n_red)),
        sink_nodes=list(range(first_sink, first_sink + n_blue)),
        var_arc={},
        arc_label=[],
        target=csp.red_total,
        fresh_base=csp.fresh_base,
    )

    def add(u: int, v: int, c: int, label: str) -> int:
        net.tail.append(u)
        net.head.append(v)
        net.cap.append(c)
        net.arc_label.append(label)
        return len(net.tail) - 1

    for i, (idx, clause) in enumerate(reds):
        add(i, red_node[idx], clause.target, f"red{i}")
    for var in sorted(csp.var_red):
        arc = add(
            red_node[csp.var_red[var]],
            blue_node[csp.var_blue[var]],
            1,
            var_token(var, csp.fresh_base),
        )
        net.var_arc[var] = arc
    for j, (idx, clause) in enumerate(blues):
        add(blue_node[idx], first_sink + j, clause.target, f"blue{j}")
    return net


def max_flow(network: FlowNetwork) -> tuple[int, list[int]]:
    """Maximum flow from the sources to the sinks, per-arc flows included.

    A super source and super sink are appended internally with effectively
    unbounded arcs; repeated phases of breadth-first leveling and blocking
    depth-first augmentation run until no augmenting path remains.  The
    arc order is fixed by the network, so the flow found is deterministic.
    """
    base_arcs = len(network.tail)
    node_total = network.node_count + 2
    s = network.node_count
    t = network.node_count + 1
    big = network.target + 1

    to: list[int] = []
    cap: list[int] = []
    adj: list[list[int]] = [[] for _ in range(node_total)]

    def add(u: int, v: int, c: int) -> None:
        adj[u].append(len(to))
        to.append(v)
        cap.append(c)
        adj[v].append(len(to))
        to.append(u)
        cap.append(0)

    for u, v, c in zip(network.tail, network.head, network.cap):
        add(u, v, c)
    for node in network.source_nodes:
        add(s, node, big)
    for node in network.sink_nodes:
        add(node, t, big)

    value = 0
    level = [0] * node_total
    it = [0] * node_total

    def bfs() -> bool:
        for i in range(node_total):
            level[i] = -1
        level[s] = 0
        frontier = deque((s,))
        while frontier:
            u = frontier.popleft()
            for a in adj[u]:
                v = to[a]
                if cap[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    frontier.append(v)
        return level[t] >= 0

    def dfs(u: int, limit: int) -> int:
        if u == t:
            return limit
        while it[u] < len(adj[u]):
            a = adj[u][it[u]]
            v = to[a]
            if cap[a] > 0 and level[v] == level[u] + 1:
                pushed = dfs(v, min(limit, cap[a]))
                if pushed:
                    cap[a] -= pushed
                    cap[a ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0

    while bfs():
        for i in range(node_total):
            it[i] = 0
        while True:
            pushed = dfs(s, big)
            if not pushed:
                break
            value += pushed

    flows = [network.cap[i] - cap[2 * i] for i in range(base_arcs)]
    return value, flows


def extract_assignment(network: FlowNetwork, flows: list[int]) -> dict[int, bool]:
    """Variable values read off the unit arcs: saturated means true."""
    return {var: flows[arc] == 1 for var, arc in network.var_arc.items()}


@dataclass
class FlowOutcome:
    """What the solver concluded about one constraint instance."""

    status: str  # "sat", "flow_shortfall", or "totals_mismatch"
    value: int = 0
    target: int = 0
    assignment: dict[int, bool] = field(default_factory=dict)
    network: FlowNetwork | None = None
    flows: list[int] = field(default_factory=list)


def solve(csp: CspInstance) -> FlowOutcome:
    """Decide a clause system, short-circuiting on unequal color totals.

    Unequal totals make the exact-count system infeasible outright (every
    variable funnels one unit from a red budget into a blue budget), so no
    network is built in that case.
    """
    red, blue = csp.red_total, csp.blue_total
    if red != blue:
        return FlowOutcome(status="totals_mismatch", value=0, target=red)
    network = csp_to_flow(csp)
    value, flows = max_flow(network)
    if value < network.target:
        return FlowOutcome(
            status="flow_shortfall",
            value=value,
            target=network.target,
            network=network,
            flows=flows,
        )
    return FlowOutcome(
        status="sat",
        value=value,
        target=network.target,
        assignment=extract_assignment(network, flows),
        network=network,
        flows=flows,
    )


def dump_flow(network: FlowNetwork, flows: list[int] | None = None) -> str:
    """Arc list as delimited text, with flows when available."""
    lines = [
        f"flow nodes={network.node_count} arcs={len(network.tail)} "
        f"target={network.target}"
    ]
    for i, (u, v, c, label) in enumerate(network.arcs()):
        suffix = f" flow={flows[i]}" if flows is not None else ""
        lines.append(f"arc {u} {v} cap={c} {label}{suffix}")
    return "\n".join(lines) + "\n"
