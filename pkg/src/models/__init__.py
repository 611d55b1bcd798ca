"""
Neural component: message-passing body with output and reflection heads
"""

from .graphs import ConstraintGraph, ModelError, build_sudoku_graph, graph_to_constraint_graph
from .refl_model import ForwardResult, ReflModel, blank_input, decode, joint_log_prob

__all__ = [
    "ConstraintGraph", "ModelError", "build_sudoku_graph", "graph_to_constraint_graph",
    "ForwardResult", "ReflModel", "blank_input", "decode", "joint_log_prob",
]
