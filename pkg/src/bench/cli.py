"""
reflx command-line interface

Exit codes: 0 when the command ran and every --expect held, 1 when the command
failed, 2 when it ran but an --expect assertion did not hold.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence
from src.autodiff import AutodiffError
from src.bench.commands import (
    REFL, SOLVER_ONLY, cmd_bench_solvers, cmd_eval, cmd_generate, cmd_graph_bench, cmd_sweep, cmd_train,
)
from src.bench.metrics import RunMetrics, check_expectations, parse_expectation
from src.bench.reports import render_table
from src.config.settings import get_settings
from src.config.train_config import BackendEnum, ConfigError, TaskEnum
from src.data.generators import GenerationError
from src.data.models import DatasetError
from src.data.oracles import OracleSizeError
from src.knowledge.base import KnowledgeError
from src.models.graphs import ModelError
from src.training.trainer import TrainingDivergedError
from src.utils.logger import get_logger, setup_logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_EXPECTATION = 2

COMMAND_ERRORS = (
    ConfigError, DatasetError, GenerationError, OracleSizeError, KnowledgeError,
    ModelError, AutodiffError, TrainingDivergedError, ValueError, OSError,
)


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflx",
        description="Train and benchmark neuro-symbolic models with abductive reflection",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
    parser.add_argument("--log-format", default=None, choices=["json", "console"])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="Seed (overrides REFLX_SEED and the config)")
        p.add_argument("--out", type=Path, default=None, help="Directory for text/JSON reports")
        p.add_argument("--workers", type=int, default=None, help="Evaluation worker processes")
        p.add_argument("--expect", action="append", default=[], metavar="METRIC<OP>VALUE",
                       help="Assertion on the emitted metrics, e.g. accuracy>=0.99 (repeatable)")

    p = sub.add_parser("train", help="Train a model from a key=value config")
    p.add_argument("--config", type=Path, required=True)
    common(p)

    p = sub.add_parser("eval", help="Evaluate a checkpoint with one selector")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--selector", default="reflection",
                   help="reflection | confidence:<frac> | zeroth:<budget> | none | solver")
    p.add_argument("--backend", default=BackendEnum.SAT.value, choices=[b.value for b in BackendEnum])
    p.add_argument("--task", default=None, choices=[t.value for t in TaskEnum])
    p.add_argument("--budget", type=int, default=None, help="Default zeroth-order query budget")
    common(p)

    p = sub.add_parser("bench-solvers", help="Solver-only against reflected abduction per backend")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--backend", type=_str_list, default=[b.value for b in BackendEnum],
                   help="Comma-separated backends (default sat,csp)")
    p.add_argument("--mode", type=_str_list, default=[SOLVER_ONLY, REFL],
                   help=f"Comma-separated modes: {SOLVER_ONLY}, {REFL}")
    common(p)

    p = sub.add_parser("graph-bench", help="Approximation ratio against the exact oracle")
    p.add_argument("--task", required=True, choices=[TaskEnum.CLIQUE.value, TaskEnum.MIS.value])
    p.add_argument("--data", type=Path, default=None, help="Edge-list file or directory; generated when absent")
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--selector", default="reflection")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--sizes", type=_int_list, default=[10, 15, 20])
    p.add_argument("--ps", type=_float_list, default=[0.3, 0.5])
    common(p)

    p = sub.add_parser("sweep", help="One row per value of a training key or of the retain fraction")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--key", required=True, help="TrainConfig key, or 'retain'")
    p.add_argument("--values", type=_str_list, required=True)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--data", type=Path, default=None)
    common(p)

    p = sub.add_parser("generate", help="Write a generated corpus with its manifest")
    p.add_argument("kind", choices=["sudoku", "graphs"])
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--side", type=int, default=4)
    p.add_argument("--clues", type=int, default=8)
    p.add_argument("--sizes", type=_int_list, default=[10, 15, 20])
    p.add_argument("--ps", type=_float_list, default=[0.3, 0.5])

    return parser


def _eval_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    return get_settings().seed or 0


def run_command(args: argparse.Namespace) -> List[RunMetrics]:
    """Dispatch one parsed command; returns the rows its --expect applies to"""
    if args.command == "train":
        result = cmd_train(args.config, seed=args.seed, workers=args.workers, out=args.out)
        return result.test_rows
    if args.command == "eval":
        run = cmd_eval(
            args.checkpoint, args.data, args.selector, backend=BackendEnum(args.backend),
            task=TaskEnum(args.task) if args.task else None, workers=args.workers,
            seed=_eval_seed(args), budget=args.budget, out=args.out,
        )
        return [run.metrics]
    if args.command == "bench-solvers":
        return cmd_bench_solvers(
            args.data, [BackendEnum(b) for b in args.backend], args.mode, checkpoint=args.checkpoint,
            workers=args.workers, seed=_eval_seed(args), out=args.out,
        )
    if args.command == "graph-bench":
        return [cmd_graph_bench(
            TaskEnum(args.task), data=args.data, count=args.count, sizes=args.sizes, ps=args.ps,
            seed=_eval_seed(args), checkpoint=args.checkpoint, selector=args.selector,
            workers=args.workers, budget=args.budget, out=args.out,
        )]
    if args.command == "sweep":
        return cmd_sweep(
            args.config, args.key, args.values, checkpoint=args.checkpoint, data=args.data,
            seed=args.seed, workers=args.workers, out=args.out,
        )
    if args.command == "generate":
        cmd_generate(args.kind, args.out, seed=args.seed, count=args.count, side=args.side,
                     clues=args.clues, sizes=args.sizes, ps=args.ps)
        return []
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(level=args.log_level, log_format=args.log_format)
    logger = get_logger("reflx.cli")

    try:
        expectations = [parse_expectation(text) for text in getattr(args, "expect", [])]
    except ValueError as e:
        parser.error(str(e))

    logger.info("command_started", command=args.command)
    try:
        rows = run_command(args)
    except COMMAND_ERRORS as e:
        logger.error("command_failed", command=args.command, error_type=type(e).__name__, error=str(e))
        print(f"reflx {args.command}: {e}", file=sys.stderr)
        return EXIT_FAILED

    if rows:
        print(render_table(rows))
    failures = check_expectations(expectations, rows)
    if expectations and not rows:
        failures.append(f"{args.command} produced no metrics to check")
    for failure in failures:
        logger.error("expectation_failed", detail=failure)
        print(f"expectation failed: {failure}", file=sys.stderr)
    logger.info("command_completed", command=args.command, rows=len(rows), failed_expectations=len(failures))
    return EXIT_EXPECTATION if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
