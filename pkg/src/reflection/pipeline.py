"""
Inference-time composition: intuitive output, reflection, abduction
"""

import time
from dataclasses import dataclass
from typing import Optional
import numpy as np
from src.knowledge.base import Assignment, KnowledgeBase
from src.models.graphs import ConstraintGraph
from src.models.refl_model import ForwardResult, ReflModel, decode
from src.reflection.reflect import ReflectionVector, apply_reflection, as_reflection
from src.reflection.selectors import (
    SelectorKind, SelectorSpec, select_by_confidence, zeroth_order_select,
)
from src.utils.logger import LoggerMixin


@dataclass
class RectifyOutcome:
    """Final output of one pipeline run and what it cost"""
    final: Optional[Assignment]
    flagged_count: int
    fallback_used: bool
    kb_query_count: int
    network_seconds: float
    abduction_seconds: float
    blanks: int = 0
    timed_out: bool = False

    @property
    def overall_seconds(self) -> float:
        return self.network_seconds + self.abduction_seconds


def rectify(
    x: Assignment, y_hat: Assignment, r, kb: KnowledgeBase, network_seconds: float = 0.0
) -> RectifyOutcome:
    """
    Abduce over the reflected output, falling back to the clues alone

    The success path makes exactly one knowledge-base call. When y_hat' is
    UNSAT the clue-only board is abduced instead and fallback_used is set;
    final is None only if that also fails.
    """
    r = as_reflection(r, y_hat.n)
    partial = apply_reflection(x, y_hat, r)
    flagged = int(np.count_nonzero(r[~x.clue_mask]))
    start = time.perf_counter()
    final = kb.abduce(partial)
    queries = 1
    fallback = False
    if final is None:
        fallback = True
        final = kb.abduce(x.clue_only())
        queries += 1
    elapsed = time.perf_counter() - start
    if final is None:
        kb.logger.warning("clue_only_abduction_unsat", positions=x.n, clues=int(x.clue_mask.sum()))
    return RectifyOutcome(
        final=final,
        flagged_count=flagged,
        fallback_used=fallback,
        kb_query_count=queries,
        network_seconds=network_seconds,
        abduction_seconds=elapsed,
        blanks=partial.blank_count,
    )


@dataclass
class PipelineResult:
    y_hat: Assignment
    r: ReflectionVector
    forward: ForwardResult
    outcome: RectifyOutcome


class ReflectionPipeline(LoggerMixin):
    """
    Runs a trained model and a flag selector end to end on single inputs

    Selector kinds: reflection (the model's own flags), confidence (lowest
    max-probability cells), zeroth (black-box subset search), none (raw y_hat)
    and solver (y_hat handed to abduction unflagged).
    """

    def __init__(self, model: ReflModel, selector: SelectorSpec, seed: int = 0):
        self.model = model
        self.selector = selector
        self.seed = seed

    def run(self, x: Assignment, graph: ConstraintGraph, kb: KnowledgeBase) -> PipelineResult:
        start = time.perf_counter()
        fr = self.model.forward(x, graph)
        y_hat, flags = decode(fr, "argmax")
        y_hat = Assignment(y_hat.values, x.clue_mask)
        network_seconds = time.perf_counter() - start

        kind = self.selector.kind
        if kind == SelectorKind.NONE:
            outcome = RectifyOutcome(y_hat, 0, False, 0, network_seconds, 0.0, blanks=0)
            return PipelineResult(y_hat, np.zeros(x.n, dtype=np.int64), fr, outcome)

        if kind == SelectorKind.ZEROTH:
            search_start = time.perf_counter()
            found = zeroth_order_select(y_hat, x, kb, budget=int(self.selector.value), seed=self.seed)
            elapsed = time.perf_counter() - search_start
            r = found.r if found.r is not None else np.zeros(x.n, dtype=np.int64)
            outcome = RectifyOutcome(
                final=found.completion,
                flagged_count=int(np.count_nonzero(r)),
                fallback_used=False,
                kb_query_count=found.queries_used,
                network_seconds=network_seconds,
                abduction_seconds=elapsed,
                blanks=apply_reflection(x, y_hat, r).blank_count,
                timed_out=found.timed_out,
            )
            return PipelineResult(y_hat, r, fr, outcome)

        if kind == SelectorKind.REFLECTION:
            r = flags
        elif kind == SelectorKind.CONFIDENCE:
            r = select_by_confidence(fr, self.selector.value, x.clue_mask)
        else:
            r = np.zeros(x.n, dtype=np.int64)
        r = np.where(x.clue_mask, 0, r)
        outcome = rectify(x, y_hat, r, kb, network_seconds=network_seconds)
        return PipelineResult(y_hat, r, fr, outcome)
