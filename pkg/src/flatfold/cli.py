"""Command line front end.

Subcommands: ``decide`` an instance, ``gen``erate a seeded random
instance, ``verify`` a result document against its instance, ``bench``
folding grids of increasing size, and ``solve-csp`` for a dumped
constraint system.  Exit status is 0 for SAT (or success), 1 for UNSAT
(or a failed verification), and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from .csp import CspInstance, dump_csp, parse_csp, var_token
from .decider import assemble_components, decide, exterior_faces, preprocess_flat_angles, verify_result
from .diagram import emit_diagram
from .errors import ClosureViolation, FlatCountViolation, InputError, InternalDegeneracy, MalformedInput
from .flow import csp_to_flow, dump_flow, max_flow, solve
from .geometry import assign_coordinates
from .model import load_graph
from .oracle import brute_force_decide, grid_instance
from .oracle import random_instance as make_random_instance
from .verdict import SAT

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_INPUT = 2


@dataclass
class RunConfig:
    """Parsed invocation, one field per flag."""

    command: str
    input: str | None = None
    result: str | None = None
    output: str | None = None
    dump_csp_path: str | None = None
    dump_flow_path: str | None = None
    diagram_path: str | None = None
    oracle: bool = False
    timings: bool = False
    seed: int = 0
    mode: str = "general"
    max_angles: int = 18
    sizes: tuple[int, ...] = (1000, 10000)
    csv_path: str | None = None
    plot_path: str | None = None


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as fault:
        raise MalformedInput(f"cannot read {path}: {fault.strerror or fault}") from fault


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as fault:
        raise MalformedInput(f"cannot write {path}: {fault.strerror or fault}") from fault


def _load_instance(path: str):
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as fault:
        raise MalformedInput(
            f"{path}: not valid JSON (line {fault.lineno}, column {fault.colno})"
        ) from fault
    return load_graph(doc)


def _merged_csp(graph) -> CspInstance | None:
    """Whole-graph constraint instance, or None when assembly is
    unreachable (bad straight-angle counts or a non-closing cycle)."""
    try:
        flat_ids, _, _ = preprocess_flat_angles(graph)
        coords = assign_coordinates(graph, flat_ids)
    except (FlatCountViolation, ClosureViolation):
        return None
    chosen = exterior_faces(graph, coords)
    pieces = assemble_components(graph, flat_ids, chosen)
    clauses: tuple = ()
    for _, csp in pieces:
        clauses += csp.clauses
    return CspInstance(clauses, len(graph.angles))


def _run_decide(cfg: RunConfig) -> int:
    graph = _load_instance(cfg.input)
    verdict = decide(graph)

    if cfg.oracle:
        check = brute_force_decide(graph)
        if check.status != verdict.status:
            raise InternalDegeneracy(
                f"pipeline returned {verdict.status} but the exhaustive "
                f"check returned {check.status}"
            )

    doc = verdict.to_document()
    if not cfg.timings:
        doc["stats"].pop("elapsed", None)
    elif "elapsed" in doc["stats"]:
        doc["stats"]["elapsed"] = round(doc["stats"]["elapsed"], 6)
    _write_text(cfg.output, json.dumps(doc, indent=2) + "\n")

    if cfg.dump_csp_path or cfg.dump_flow_path or cfg.diagram_path:
        merged = _merged_csp(graph)
        if cfg.dump_csp_path:
            if merged is None:
                print("flatfold: no constraint system to dump "
                      "(instance fails before assembly)", file=sys.stderr)
            else:
                _write_text(cfg.dump_csp_path, dump_csp(merged))
        if cfg.dump_flow_path:
            if merged is None:
                print("flatfold: no flow network to dump "
                      "(instance fails before assembly)", file=sys.stderr)
            else:
                network = csp_to_flow(merged)
                _, flows = max_flow(network)
                _write_text(cfg.dump_flow_path, dump_flow(network, flows))
        if cfg.diagram_path:
            emit_diagram(graph, merged, cfg.diagram_path)

    return EXIT_SAT if verdict.status == SAT else EXIT_UNSAT


def _run_gen(cfg: RunConfig) -> int:
    graph = make_random_instance(cfg.seed, max_angles=cfg.max_angles, mode=cfg.mode)
    _write_text(cfg.output, json.dumps(graph.to_document(), indent=2) + "\n")
    return EXIT_SAT


def _run_verify(cfg: RunConfig) -> int:
    graph = _load_instance(cfg.input)
    try:
        result = json.loads(_read_text(cfg.result))
    except json.JSONDecodeError as fault:
        raise MalformedInput(
            f"{cfg.result}: not valid JSON (line {fault.lineno}, column {fault.colno})"
        ) from fault
    if not isinstance(result, dict):
        raise MalformedInput(f"{cfg.result}: result document must be an object")
    problems = verify_result(graph, result)
    if problems:
        for problem in problems:
            print(f"invalid: {problem}")
        return EXIT_UNSAT
    print("result verified")
    return EXIT_SAT


def _run_solve_csp(cfg: RunConfig) -> int:
    csp = parse_csp(_read_text(cfg.input))
    outcome = solve(csp)
    if outcome.status == "sat":
        print("SAT")
        base = csp.fresh_base
        for var in sorted(outcome.assignment):
            print(f"{var_token(var, base)}={int(outcome.assignment[var])}")
        return EXIT_SAT
    print(f"UNSAT {outcome.status} value={outcome.value} target={outcome.target}")
    return EXIT_UNSAT


def _run_bench(cfg: RunConfig) -> int:
    import csv as csv_module
    import io

    rows = []
    for target in cfg.sizes:
        side = max(1, round((target / 4) ** 0.5))
        graph = load_graph(grid_instance(side, side))
        start = time.perf_counter()
        verdict = decide(graph)
        elapsed = time.perf_counter() - start
        rows.append(
            {
                "angles": verdict.stats["angles"],
                "clauses": verdict.stats["clauses"],
                "variables": verdict.stats["variables"],
                "flow_value": verdict.stats["flow_value"],
                "seconds": round(elapsed, 4),
                "status": verdict.status,
            }
        )

    buffer = io.StringIO()
    writer = csv_module.DictWriter(buffer, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    _write_text(cfg.csv_path, buffer.getvalue())

    if cfg.plot_path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots()
        ax.loglog([r["angles"] for r in rows], [max(r["seconds"], 1e-4) for r in rows], "o-")
        ax.set_xlabel("angles")
        ax.set_ylabel("seconds")
        ax.set_title("decide() on square grids")
        ax.grid(True, which="both", linewidth=0.3)
        fig.savefig(cfg.plot_path)
        plt.close(fig)
    return EXIT_SAT


def run(cfg: RunConfig) -> int:
    handlers = {
        "decide": _run_decide,
        "gen": _run_gen,
        "verify": _run_verify,
        "solve-csp": _run_solve_csp,
        "bench": _run_bench,
    }
    return handlers[cfg.command](cfg)


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers")
    if not sizes or any(s < 4 for s in sizes):
        raise argparse.ArgumentTypeError("each size must be at least 4")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatfold",
        description="Decide flat foldability of embedded planar multigraphs "
        "with rational edge lengths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide one instance document")
    p.add_argument("input", help="instance JSON file, or - for stdin")
    p.add_argument("--output", help="write the result document here instead of stdout")
    p.add_argument("--dump-csp", dest="dump_csp_path", metavar="PATH",
                   help="also write the assembled constraint system")
    p.add_argument("--dump-flow", dest="dump_flow_path", metavar="PATH",
                   help="also write the flow network with its maximum flow")
    p.add_argument("--emit-diagram", dest="diagram_path", metavar="PATH",
                   help="also render the instance and clause structure to a figure")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check the verdict against exhaustive search")
    p.add_argument("--timings", action="store_true",
                   help="include elapsed seconds in the stats block")

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", default="general",
                   choices=["general", "cycle", "closed", "tree", "decorated", "multi"])
    p.add_argument("--max-angles", dest="max_angles", type=int, default=18)
    p.add_argument("--output", help="write the instance here instead of stdout")

    p = sub.add_parser("verify", help="check a result document against its instance")
    p.add_argument("input", help="instance JSON file")
    p.add_argument("result", help="result JSON file to verify")

    p = sub.add_parser("solve-csp", help="decide a dumped constraint system")
    p.add_argument("input", help="constraint dump, or - for stdin")

    p = sub.add_parser("bench", help="time decide() on square grids")
    p.add_argument("--sizes", type=_parse_sizes, default=(1000, 10000),
                   help="comma-separated target angle counts (default 1000,10000)")
    p.add_argument("--csv", dest="csv_path", help="write timings CSV here instead of stdout")
    p.add_argument("--plot", dest="plot_path", help="render a log-log timing figure here")
    return parser


def main(argv: list[str] | None = None) -> int:
    namespace = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(namespace))
    try:
        return run(cfg)
    except InputError as fault:
        print(f"flatfold: {fault}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
