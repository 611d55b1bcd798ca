"""
Reflection pipeline: y_hat -> r -> y_hat' -> abduced output
"""

from .reflect import ReflectionVector, apply_reflection, as_reflection
from .selectors import (
    SelectionStats, SelectorKind, SelectorSpec, ZerothOrderResult,
    evaluate_selection, parse_selector, select_by_confidence, zeroth_order_select,
)
from .pipeline import PipelineResult, RectifyOutcome, ReflectionPipeline, rectify
from .evaluation import Example, ExampleResult, evaluate_example, score_result

__all__ = [
    "ReflectionVector", "apply_reflection", "as_reflection",
    "SelectionStats", "SelectorKind", "SelectorSpec", "ZerothOrderResult",
    "evaluate_selection", "parse_selector", "select_by_confidence", "zeroth_order_select",
    "PipelineResult", "RectifyOutcome", "ReflectionPipeline", "rectify",
    "Example", "ExampleResult", "evaluate_example", "score_result",
]
