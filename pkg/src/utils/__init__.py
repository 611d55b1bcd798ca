"""
Utility functions for reflx
"""

from .logger import setup_logger, get_logger, LoggerMixin, log_performance
from .validators import infer_side, validate_digit_string, validate_probability

__all__ = [
    "setup_logger",
    "get_logger",
    "LoggerMixin",
    "log_performance",
    "infer_side",
    "validate_digit_string",
    "validate_probability",
]
