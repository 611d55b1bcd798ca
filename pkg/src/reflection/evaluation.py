"""
Per-example evaluation of the pipeline
"""

from dataclasses import dataclass
from typing import Optional
import numpy as np
from pydantic import BaseModel
from src.config.train_config import TaskEnum
from src.knowledge.base import Assignment, KnowledgeBase
from src.models.graphs import ConstraintGraph
from src.reflection.pipeline import PipelineResult, ReflectionPipeline
from src.reflection.selectors import evaluate_selection


@dataclass
class Example:
    """One task instance ready for the model and the knowledge base"""
    example_id: str
    task: TaskEnum
    x: Assignment
    graph: ConstraintGraph
    kb: KnowledgeBase
    y_true: Optional[Assignment] = None
    labeled: bool = True
    optimum: Optional[int] = None


class ExampleResult(BaseModel):
    """Per-example record written to the results JSON lines"""
    input_id: str
    flagged_count: int
    fallback_used: bool
    correct: bool
    raw_correct: bool
    network_seconds: float
    abduction_seconds: float
    kb_query_count: int
    timed_out: bool = False
    blanks: int = 0
    clue_blanks: int = 0
    recall: Optional[float] = None
    precision: Optional[float] = None
    set_size: Optional[int] = None
    optimum: Optional[int] = None
    approx_ratio: Optional[float] = None


def _set_quality(kb: KnowledgeBase, a: Optional[Assignment], optimum: Optional[int]):
    if a is None:
        return 0, 0.0
    size = len(a.node_set())
    feasible = kb.measure(a).fully_consistent
    if not feasible or not optimum:
        return size, 0.0
    return size, size / optimum


def score_result(example: Example, result: PipelineResult) -> ExampleResult:
    """Compare a pipeline run against the example's ground truth"""
    outcome = result.outcome
    kb = example.kb
    record = dict(
        input_id=example.example_id,
        flagged_count=outcome.flagged_count,
        fallback_used=outcome.fallback_used,
        network_seconds=outcome.network_seconds,
        abduction_seconds=outcome.abduction_seconds,
        kb_query_count=outcome.kb_query_count,
        timed_out=outcome.timed_out,
        blanks=outcome.blanks,
        clue_blanks=example.x.clue_only().blank_count,
    )
    if example.y_true is not None:
        stats = evaluate_selection(result.r, result.y_hat, example.y_true)
        record.update(recall=stats.recall, precision=stats.precision)

    if example.task == TaskEnum.SUDOKU:
        final = outcome.final
        if example.y_true is not None:
            correct = final is not None and bool(np.array_equal(final.values, example.y_true.values))
            raw = bool(np.array_equal(result.y_hat.values, example.y_true.values))
        else:
            correct = final is not None and kb.is_solution(final)
            raw = kb.is_solution(result.y_hat)
        return ExampleResult(correct=correct, raw_correct=raw, **record)

    size, ratio = _set_quality(kb, outcome.final, example.optimum)
    _, raw_ratio = _set_quality(kb, result.y_hat, example.optimum)
    return ExampleResult(
        correct=ratio >= 1.0,
        raw_correct=raw_ratio >= 1.0,
        set_size=size,
        optimum=example.optimum,
        approx_ratio=ratio,
        **record,
    )


def evaluate_example(pipeline: ReflectionPipeline, example: Example) -> ExampleResult:
    return score_result(example, pipeline.run(example.x, example.graph, example.kb))
