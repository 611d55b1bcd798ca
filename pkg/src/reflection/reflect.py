"""
Reflection vectors and the error-removed output
"""

import numpy as np
from src.config.constants import BLANK
from src.knowledge.base import Assignment, KnowledgeError

# 0/1 flag per position; 1 marks a suspected error
ReflectionVector = np.ndarray


def as_reflection(r, n: int) -> ReflectionVector:
    vec = np.asarray(r, dtype=np.int64).reshape(-1)
    if vec.size != n:
        raise KnowledgeError(f"reflection vector has {vec.size} flags, assignment has {n} positions")
    if np.any((vec != 0) & (vec != 1)):
        raise KnowledgeError("reflection flags must be 0 or 1")
    return vec


def apply_reflection(x: Assignment, y_hat: Assignment, r) -> Assignment:
    """
    Blank every flagged position of y_hat, keeping x's clues

    Returns:
        y_hat' carrying x's clue mask; clue positions hold their clue value
        whatever r says
    """
    if x.n != y_hat.n:
        raise KnowledgeError(f"input has {x.n} positions, y_hat has {y_hat.n}")
    r = as_reflection(r, y_hat.n)
    values = np.where(r == 1, BLANK, y_hat.values)
    values = np.where(x.clue_mask, x.values, values)
    return Assignment(values, x.clue_mask)
