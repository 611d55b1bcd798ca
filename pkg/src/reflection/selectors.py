"""
Error-selection mechanisms and the flag recall metric
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Set, FrozenSet, Tuple
import numpy as np
from pydantic import BaseModel
from src.config.constants import (
    ZEROTH_MAX_STEPS, ZEROTH_NEIGHBOR_SAMPLES, ZEROTH_RESTARTS_PER_SIZE,
)
from src.knowledge.base import Assignment, KnowledgeBase
from src.models.refl_model import ForwardResult
from src.reflection.reflect import ReflectionVector, apply_reflection, as_reflection
from src.utils.logger import get_logger

logger = get_logger("selectors")


class SelectorKind(str, Enum):
    REFLECTION = "reflection"
    CONFIDENCE = "confidence"
    ZEROTH = "zeroth"
    NONE = "none"
    SOLVER = "solver"


class SelectorSpec(BaseModel):
    """A parsed selector argument such as "confidence:0.8" or "zeroth:10000" """
    kind: SelectorKind
    value: Optional[float] = None

    def __str__(self) -> str:
        if self.value is None:
            return self.kind.value
        shown = int(self.value) if self.kind == SelectorKind.ZEROTH else self.value
        return f"{self.kind.value}:{shown}"


def parse_selector(text: str, default_budget: int = 10_000) -> SelectorSpec:
    """
    Parse reflection | confidence:<frac> | zeroth:<budget> | none | solver

    Raises:
        ValueError: on an unknown kind or an out-of-range parameter
    """
    name, _, arg = text.strip().partition(":")
    try:
        kind = SelectorKind(name.lower())
    except ValueError:
        raise ValueError(f"unknown selector {name!r}; expected one of {[k.value for k in SelectorKind]}") from None
    if kind == SelectorKind.CONFIDENCE:
        frac = float(arg) if arg else 0.8
        if not 0.0 < frac <= 1.0:
            raise ValueError(f"confidence retain fraction must be in (0, 1], got {frac}")
        return SelectorSpec(kind=kind, value=frac)
    if kind == SelectorKind.ZEROTH:
        budget = int(arg) if arg else default_budget
        if budget < 1:
            raise ValueError(f"zeroth-order budget must be at least 1, got {budget}")
        return SelectorSpec(kind=kind, value=budget)
    if arg:
        raise ValueError(f"selector {kind.value!r} takes no parameter")
    return SelectorSpec(kind=kind)


def select_by_confidence(fr: ForwardResult, retain_fraction: float, clue_mask=None) -> ReflectionVector:
    """
    Flag the least confident non-clue positions

    Exactly ceil(m * (1 - retain_fraction)) of the m non-clue positions are
    flagged, lowest max-probability first, ties to the lower index.
    """
    if not 0.0 < retain_fraction <= 1.0:
        raise ValueError(f"retain_fraction must be in (0, 1], got {retain_fraction}")
    n = fr.n
    free = np.arange(n) if clue_mask is None else np.flatnonzero(~np.asarray(clue_mask, dtype=bool))
    # rounding first keeps 10 * (1 - 0.8) from becoming 3 flags
    k = math.ceil(round(free.size * (1.0 - retain_fraction), 9))
    confidence = fr.cell_probs.max(axis=1)[free]
    order = np.argsort(confidence, kind="stable")
    r = np.zeros(n, dtype=np.int64)
    r[free[order[:k]]] = 1
    return r


@dataclass
class ZerothOrderResult:
    r: Optional[ReflectionVector]
    completion: Optional[Assignment]
    queries_used: int
    timed_out: bool


class _BudgetExhausted(Exception):
    pass


def zeroth_order_select(
    y_hat: Assignment, x: Assignment, kb: KnowledgeBase, budget: int, seed: int = 0
) -> ZerothOrderResult:
    """
    Black-box search for a flag set whose abduction succeeds

    Flag-set sizes are tried in increasing order. For each size, randomized
    hill-climbing restarts from a random subset and moves to the best of a
    sample of swap neighbours, scored by the partial consistency of y_hat'.
    Every evaluated subset costs one abduction query; the search stops at the
    first subset whose completion is fully consistent.

    Returns:
        The flags and completion found, or timed_out=True once the budget is spent
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    free = np.flatnonzero(~x.clue_mask)
    visited: Set[FrozenSet[int]] = set()
    queries = 0

    def evaluate(subset: FrozenSet[int]) -> Tuple[Optional[Assignment], int]:
        nonlocal queries
        if queries >= budget:
            raise _BudgetExhausted
        queries += 1
        visited.add(subset)
        r = np.zeros(x.n, dtype=np.int64)
        r[list(subset)] = 1
        partial = apply_reflection(x, y_hat, r)
        completion = kb.abduce(partial)
        if completion is not None and kb.is_solution(completion):
            return completion, kb.measure(partial).points
        return None, kb.measure(partial).points

    def found(subset: FrozenSet[int], completion: Assignment) -> ZerothOrderResult:
        r = np.zeros(x.n, dtype=np.int64)
        r[list(subset)] = 1
        return ZerothOrderResult(as_reflection(r, x.n), completion, queries, False)

    try:
        completion, _ = evaluate(frozenset())
        if completion is not None:
            return found(frozenset(), completion)
        for size in range(1, free.size + 1):
            total = math.comb(free.size, size)
            for _ in range(ZEROTH_RESTARTS_PER_SIZE):
                if sum(len(s) == size for s in visited) >= total:
                    break
                current = frozenset(int(v) for v in rng.choice(free, size=size, replace=False))
                if current in visited:
                    continue
                completion, score = evaluate(current)
                if completion is not None:
                    return found(current, completion)
                for _ in range(ZEROTH_MAX_STEPS):
                    outside = [int(v) for v in free if int(v) not in current]
                    if not outside:
                        break
                    best_subset, best_score = None, score
                    for _ in range(ZEROTH_NEIGHBOR_SAMPLES):
                        drop = int(rng.choice(sorted(current)))
                        add = int(rng.choice(outside))
                        neighbour = (current - {drop}) | {add}
                        if neighbour in visited:
                            continue
                        completion, n_score = evaluate(neighbour)
                        if completion is not None:
                            return found(neighbour, completion)
                        if n_score > best_score:
                            best_subset, best_score = neighbour, n_score
                    if best_subset is None:
                        break
                    current, score = best_subset, best_score
    except _BudgetExhausted:
        logger.debug("zeroth_order_timeout", budget=budget, free_positions=int(free.size))
        return ZerothOrderResult(None, None, queries, True)
    return ZerothOrderResult(None, None, queries, False)


@dataclass(frozen=True)
class SelectionStats:
    recall: float
    precision: float
    flagged_count: int
    error_count: int
    true_flags: int


def evaluate_selection(r, y_hat: Assignment, y_true: Assignment) -> SelectionStats:
    """
    Recall and precision of flags against the actual errors of y_hat

    Errors are counted over non-clue positions only. Recall is 1.0 when y_hat has no
    such errors; precision is 1.0 when nothing is flagged.
    """
    r = as_reflection(r, y_hat.n)
    if y_true.n != y_hat.n:
        raise ValueError(f"y_true has {y_true.n} positions, y_hat has {y_hat.n}")
    errors = (y_hat.values != y_true.values) & ~y_hat.clue_mask
    flagged = r == 1
    hits = int(np.count_nonzero(errors & flagged))
    n_errors = int(np.count_nonzero(errors))
    n_flagged = int(np.count_nonzero(flagged))
    recall = hits / n_errors if n_errors else 1.0
    precision = hits / n_flagged if n_flagged else 1.0
    return SelectionStats(recall, precision, n_flagged, n_errors, hits)
