"""Flat foldability of embedded planar multigraphs with exact edge lengths."""

from .csp import CspInstance, assemble, dump_csp, parse_csp
from .decider import decide, verify_result
from .diagram import emit_diagram
from .errors import (
    ClosureViolation,
    DiameterViolation,
    FlatCountViolation,
    FlatFoldError,
    InputError,
    InternalError,
    MalformedInput,
    TooLarge,
)
from .face_constraints import BLUE, RED, Clause, generate_face_constraints
from .flow import FlowNetwork, csp_to_flow, dump_flow, max_flow, solve
from .geometry import assign_coordinates, choose_exterior, folded_diameter
from .model import (
    EmbeddedGraph,
    FaceCycle,
    build_document,
    format_length,
    load_graph,
    parse_length,
)
from .oracle import (
    brute_force_decide,
    count_foldings,
    crimp_check,
    grid_instance,
    random_instance,
    stack_check,
    verify_witness,
)
from .verdict import SAT, UNSAT, Verdict

__version__ = "0.1.0"

__all__ = [
    "BLUE",
    "RED",
    "SAT",
    "UNSAT",
    "Clause",
    "ClosureViolation",
    "CspInstance",
    "DiameterViolation",
    "EmbeddedGraph",
    "FaceCycle",
    "FlatCountViolation",
    "FlatFoldError",
    "FlowNetwork",
    "InputError",
    "InternalError",
    "MalformedInput",
    "TooLarge",
    "Verdict",
    "assemble",
    "assign_coordinates",
    "brute_force_decide",
    "build_document",
    "choose_exterior",
    "count_foldings",
    "crimp_check",
    "csp_to_flow",
    "decide",
    "dump_csp",
    "dump_flow",
    "emit_diagram",
    "folded_diameter",
    "format_length",
    "generate_face_constraints",
    "grid_instance",
    "load_graph",
    "max_flow",
    "parse_csp",
    "parse_length",
    "random_instance",
    "solve",
    "stack_check",
    "verify_witness",
    "verify_result",
]
