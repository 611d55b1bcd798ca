"""
Run-level metrics, their associative accumulation, and --expect assertions
"""

import operator
import re
from dataclasses import dataclass, fields
from typing import Callable, Dict, Iterable, List, Optional, Tuple
from pydantic import BaseModel
from src.reflection.evaluation import ExampleResult


class RunMetrics(BaseModel):
    """One row of a results table"""
    label: str
    examples: int
    accuracy: float
    raw_accuracy: float
    recall: Optional[float] = None
    precision: Optional[float] = None
    mean_flagged: float = 0.0
    fallback_rate: float = 0.0
    timeout_rate: float = 0.0
    mean_network_seconds: float = 0.0
    mean_abduction_seconds: float = 0.0
    mean_overall_seconds: float = 0.0
    mean_kb_queries: float = 0.0
    mean_blanks: float = 0.0
    mean_clue_blanks: float = 0.0
    approx_ratio: Optional[float] = None


@dataclass
class MetricsAccumulator:
    """
    Sums over example results

    merge() is associative and commutative, so per-worker accumulators can be
    combined in any grouping.
    """
    count: int = 0
    correct: int = 0
    raw_correct: int = 0
    recall_sum: float = 0.0
    recall_count: int = 0
    precision_sum: float = 0.0
    precision_count: int = 0
    flagged: int = 0
    fallbacks: int = 0
    timeouts: int = 0
    network_seconds: float = 0.0
    abduction_seconds: float = 0.0
    kb_queries: int = 0
    blanks: int = 0
    clue_blanks: int = 0
    ratio_sum: float = 0.0
    ratio_count: int = 0

    def add(self, r: ExampleResult) -> "MetricsAccumulator":
        self.count += 1
        self.correct += int(r.correct)
        self.raw_correct += int(r.raw_correct)
        if r.recall is not None:
            self.recall_sum += r.recall
            self.recall_count += 1
        if r.precision is not None:
            self.precision_sum += r.precision
            self.precision_count += 1
        self.flagged += r.flagged_count
        self.fallbacks += int(r.fallback_used)
        self.timeouts += int(r.timed_out)
        self.network_seconds += r.network_seconds
        self.abduction_seconds += r.abduction_seconds
        self.kb_queries += r.kb_query_count
        self.blanks += r.blanks
        self.clue_blanks += r.clue_blanks
        if r.approx_ratio is not None:
            self.ratio_sum += r.approx_ratio
            self.ratio_count += 1
        return self

    def merge(self, other: "MetricsAccumulator") -> "MetricsAccumulator":
        return MetricsAccumulator(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    @classmethod
    def of(cls, results: Iterable[ExampleResult]) -> "MetricsAccumulator":
        acc = cls()
        for r in results:
            acc.add(r)
        return acc

    def finalize(self, label: str) -> RunMetrics:
        n = max(self.count, 1)
        return RunMetrics(
            label=label,
            examples=self.count,
            accuracy=self.correct / n,
            raw_accuracy=self.raw_correct / n,
            recall=self.recall_sum / self.recall_count if self.recall_count else None,
            precision=self.precision_sum / self.precision_count if self.precision_count else None,
            mean_flagged=self.flagged / n,
            fallback_rate=self.fallbacks / n,
            timeout_rate=self.timeouts / n,
            mean_network_seconds=self.network_seconds / n,
            mean_abduction_seconds=self.abduction_seconds / n,
            mean_overall_seconds=(self.network_seconds + self.abduction_seconds) / n,
            mean_kb_queries=self.kb_queries / n,
            mean_blanks=self.blanks / n,
            mean_clue_blanks=self.clue_blanks / n,
            approx_ratio=self.ratio_sum / self.ratio_count if self.ratio_count else None,
        )


_OPERATORS: Dict[str, Callable[[float, float], bool]] = {
    ">=": operator.ge,
    "<=": operator.le,
    "==": operator.eq,
    ">": operator.gt,
    "<": operator.lt,
}
_EXPECT = re.compile(r"^\s*([a-z_]+)\s*(>=|<=|==|>|<)\s*(-?[0-9.eE+-]+)\s*$")


@dataclass(frozen=True)
class Expectation:
    metric: str
    op: str
    value: float

    def check(self, metrics: RunMetrics) -> Tuple[bool, Optional[float]]:
        actual = getattr(metrics, self.metric)
        if actual is None:
            return False, None
        return _OPERATORS[self.op](float(actual), self.value), float(actual)

    def __str__(self) -> str:
        return f"{self.metric}{self.op}{self.value:g}"


def parse_expectation(text: str) -> Expectation:
    """Parse "metric<op>value" with op one of >=, <=, ==, >, <"""
    match = _EXPECT.match(text)
    if not match:
        raise ValueError(f"cannot parse expectation {text!r}; expected metric<op>value")
    metric, op, value = match.groups()
    if metric not in RunMetrics.model_fields or metric == "label":
        raise ValueError(f"unknown metric {metric!r} in expectation {text!r}")
    return Expectation(metric, op, float(value))


def check_expectations(expectations: List[Expectation], rows: List[RunMetrics]) -> List[str]:
    """Every expectation against every row; returns failure descriptions"""
    failures = []
    for row in rows:
        for exp in expectations:
            ok, actual = exp.check(row)
            if not ok:
                failures.append(f"{row.label}: expected {exp}, got {actual}")
    return failures
