"""Nowhere-zero flows on signed graphs: exact solvers and constructive algorithms."""
from .core import SignedGraph, parse_graph, read_graph, format_graph, graph_hash
from .errors import (
    AuditFailure,
    BudgetExceeded,
    FormatError,
    InvariantViolation,
    NotFlowAdmissible,
    PreconditionError,
    SignedFlowError,
    SizeLimitError,
)
from .flows import FlowAssignment, GroupSpec, Orientation, default_orientation
from .search import Constraints, find_nzf, find_nzw, is_flow_admissible, min_flow_number
from .construct import PipelineTrace, build_11flow, three_nzf_prescribed, z3_to_5nzf, z2_to_3flow

__all__ = [
    "AuditFailure",
    "BudgetExceeded",
    "Constraints",
    "FlowAssignment",
    "FormatError",
    "GroupSpec",
    "InvariantViolation",
    "NotFlowAdmissible",
    "Orientation",
    "PipelineTrace",
    "PreconditionError",
    "SignedFlowError",
    "SignedGraph",
    "SizeLimitError",
    "build_11flow",
    "default_orientation",
    "find_nzf",
    "find_nzw",
    "format_graph",
    "graph_hash",
    "is_flow_admissible",
    "min_flow_number",
    "parse_graph",
    "read_graph",
    "three_nzf_prescribed",
    "z2_to_3flow",
    "z3_to_5nzf",
]

__version__ = "0.1.0"
