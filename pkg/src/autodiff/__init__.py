"""
Minimal reverse-mode automatic differentiation for reflx models and losses
"""

from .tensor import (
    Tensor, Tape, TapeNode, AutodiffError, ShapeError, BackwardError, NonFiniteError,
    backpropagate, constant, current_tape,
    matmul, add, multiply, relu, sigmoid, softmax, log_softmax, embedding,
    mean, sum, concat, cross_entropy, square, one_hot,
)
from .optim import ParameterSet, adam_update
from .gradcheck import finite_diff_check
from .checkpoint import CheckpointError, save_checkpoint, load_checkpoint

__all__ = [
    "Tensor", "Tape", "TapeNode", "AutodiffError", "ShapeError", "BackwardError",
    "NonFiniteError", "backpropagate", "constant", "current_tape",
    "matmul", "add", "multiply", "relu", "sigmoid", "softmax", "log_softmax",
    "embedding", "mean", "sum", "concat", "cross_entropy", "square", "one_hot",
    "ParameterSet", "adam_update", "finite_diff_check",
    "CheckpointError", "save_checkpoint", "load_checkpoint",
]
