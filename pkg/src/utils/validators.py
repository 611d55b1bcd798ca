"""
Validation utilities for reflx
"""

import math
from typing import Optional
from src.config.constants import SUDOKU_SIDES
from src.utils.logger import get_logger

logger = get_logger("validators")


def infer_side(length: int) -> Optional[int]:
    """
    Infer a Sudoku side from a flat board length

    Args:
        length: Number of cells

    Returns:
        The side (4 or 9) or None when the length is not a supported square
    """
    side = math.isqrt(length)
    if side * side != length or side not in SUDOKU_SIDES:
        return None
    return side


def validate_digit_string(text: str, side: int, allow_blank: bool) -> Optional[str]:
    """
    Validate a flat board string

    Args:
        text: Board as digits, '0' marking a blank
        side: Board side
        allow_blank: Whether '0' is permitted

    Returns:
        None when valid, otherwise a short reason
    """
    if not isinstance(text, str):
        return "not a string"
    if len(text) != side * side:
        return f"expected {side * side} characters, got {len(text)}"
    low = 0 if allow_blank else 1
    for ch in text:
        if not ch.isdigit() or not low <= int(ch) <= side:
            logger.debug("digit_validation_failed", character=ch, side=side)
            return f"symbol {ch!r} outside {low}..{side}"
    return None


def validate_probability(p: float) -> bool:
    """Check p lies in [0, 1]"""
    return isinstance(p, (int, float)) and 0.0 <= p <= 1.0
