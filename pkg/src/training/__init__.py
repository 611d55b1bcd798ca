"""
Training: losses, example building and the training loop
"""

from .dataset import graph_examples, labeled_mask, load_examples, sudoku_examples
from .losses import (
    ConsistencyTerm, LossBreakdown, RewardBaseline,
    delta_con, loss_con, loss_labeled, loss_size, total_loss,
)
from .trainer import EpochRecord, TrainResult, Trainer, TrainingDivergedError, train, validation_score

__all__ = [
    "graph_examples", "labeled_mask", "load_examples", "sudoku_examples",
    "ConsistencyTerm", "LossBreakdown", "RewardBaseline",
    "delta_con", "loss_con", "loss_labeled", "loss_size", "total_loss",
    "EpochRecord", "TrainResult", "Trainer", "TrainingDivergedError", "train", "validation_score",
]
