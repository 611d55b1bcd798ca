"""
Command-line surface: training runs, evaluation, benchmarks and reports
"""

from .metrics import Expectation, MetricsAccumulator, RunMetrics, check_expectations, parse_expectation
from .evaluation import EvaluationRun, evaluate_examples
from .reports import read_report, render_table, write_report, write_results_jsonl
from .commands import (
    RunManifest, TrainCommandResult, check_compatible, cmd_bench_solvers, cmd_eval,
    cmd_generate, cmd_graph_bench, cmd_sweep, cmd_train, git_describe,
)

__all__ = [
    "Expectation", "MetricsAccumulator", "RunMetrics", "check_expectations", "parse_expectation",
    "EvaluationRun", "evaluate_examples",
    "read_report", "render_table", "write_report", "write_results_jsonl",
    "RunManifest", "TrainCommandResult", "check_compatible", "cmd_bench_solvers", "cmd_eval",
    "cmd_generate", "cmd_graph_bench", "cmd_sweep", "cmd_train", "git_describe",
]
