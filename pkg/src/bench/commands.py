"""
Command implementations behind the reflx CLI

Each command returns its metrics so the CLI (and tests) can check --expect
assertions; reports and per-example records are written under --out when given.
"""

import json
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import numpy as np
from pydantic import BaseModel
from src.config.settings import get_settings
from src.config.train_config import (
    BackendEnum, ConfigError, ConsistencyModeEnum, TaskEnum, TrainConfig, load_train_config,
)
from src.data.generators import generate_graph_corpus, generate_sudoku
from src.data.loader import CorpusLoader
from src.models.graphs import ModelError
from src.models.refl_model import ReflModel, blank_input
from src.reflection.evaluation import Example, ExampleResult
from src.reflection.selectors import SelectorKind, SelectorSpec, parse_selector
from src.training.dataset import graph_examples, load_examples, sudoku_examples
from src.training.trainer import TrainResult, train
from src.bench.evaluation import EvaluationRun, evaluate_examples
from src.bench.metrics import MetricsAccumulator, RunMetrics
from src.bench.reports import write_report, write_results_jsonl
from src.utils.logger import get_logger, log_performance

logger = get_logger("bench.commands")

RUN_MANIFEST_NAME = "run_manifest.json"
SOLVER_ONLY = "solver-only"
REFL = "refl"


def git_describe() -> str:
    """`git describe --always --dirty` of the working tree, or "unknown" outside git"""
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10, check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return proc.stdout.strip() if proc.returncode == 0 and proc.stdout.strip() else "unknown"


class RunManifest(BaseModel):
    """Everything needed to reproduce a run: command, code version, seed and config"""
    command: str
    git_describe: str
    tool_version: str
    seed: int
    config: Dict[str, str]
    outputs: Dict[str, str] = {}


def write_run_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    path = Path(out_dir) / RUN_MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _emit(out: Optional[Path], name: str, rows: Sequence[RunMetrics],
          results: Optional[Sequence[ExampleResult]] = None, extra: Optional[Dict[str, Any]] = None) -> None:
    if out is None:
        return
    write_report(out, name, rows, extra)
    if results is not None:
        write_results_jsonl(Path(out) / f"{name}_examples.jsonl", results)


def check_compatible(model: ReflModel, task: Optional[TaskEnum] = None, side: Optional[int] = None) -> None:
    """Raise ModelError when a checkpoint cannot serve the requested task or board size"""
    if task is not None and model.task != TaskEnum(task):
        raise ModelError(f"checkpoint was trained for {model.task.value}, not {TaskEnum(task).value}")
    if side is not None and model.task == TaskEnum.SUDOKU and model.side != side:
        raise ModelError(f"checkpoint expects {model.side}x{model.side} boards, data holds {side}x{side}")


def load_task_examples(
    model: ReflModel,
    data: Path,
    backend: BackendEnum = BackendEnum.SAT,
    consistency: ConsistencyModeEnum = ConsistencyModeEnum.GRADED,
    loader: Optional[CorpusLoader] = None,
) -> List[Example]:
    """Examples for the checkpoint's task, with its board size checked against the data"""
    loader = loader or CorpusLoader()
    prefix = Path(data).stem
    if model.task == TaskEnum.SUDOKU:
        records = loader.load_sudoku_csv(data)
        if records:
            check_compatible(model, side=records[0].side)
        return sudoku_examples(records, backend, consistency, 1.0, 0, prefix)
    return graph_examples(loader.load_graphs(data), model.task, consistency)


@dataclass
class TrainCommandResult:
    config: TrainConfig
    train: TrainResult
    test_rows: List[RunMetrics] = field(default_factory=list)
    manifest_path: Optional[Path] = None


@log_performance
def cmd_train(
    config_path: Path,
    overrides: Optional[Dict[str, str]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    out: Optional[Path] = None,
) -> TrainCommandResult:
    """
    Train from a config file

    Writes model.ckpt, metrics.jsonl and run_manifest.json under out_dir (out,
    when given, replaces the config's out_dir). With test_data configured, the
    best checkpoint is also evaluated with the reflection selector and without
    it, and a "test" report is written.
    """
    if out is not None:
        overrides = {**(overrides or {}), "out_dir": str(out)}
    config = load_train_config(config_path, overrides, seed=seed)
    config.check_paths()
    result = train(config)
    out_dir = Path(config.out_dir)

    rows: List[RunMetrics] = []
    if config.test_data is not None and result.checkpoint is not None and result.checkpoint.exists():
        model = ReflModel.load(result.checkpoint)
        examples = load_examples(config, config.test_data, 1.0)
        for selector in (SelectorSpec(kind=SelectorKind.REFLECTION), SelectorSpec(kind=SelectorKind.NONE)):
            run = evaluate_examples(model, examples, selector, workers=workers, seed=config.seed)
            rows.append(run.metrics)
        write_report(out_dir, "test", rows)

    manifest = RunManifest(
        command="train",
        git_describe=git_describe(),
        tool_version=get_settings().app_version,
        seed=config.seed,
        config=config.to_flat(),
        outputs={
            "checkpoint": str(result.checkpoint),
            "metrics": str(out_dir / "metrics.jsonl"),
            "best_epoch": str(result.best_epoch),
        },
    )
    manifest_path = write_run_manifest(out_dir, manifest)
    logger.info("train_command_completed", out_dir=str(out_dir), best_epoch=result.best_epoch)
    return TrainCommandResult(config, result, rows, manifest_path)


@log_performance
def cmd_eval(
    checkpoint: Path,
    data: Path,
    selector: str = "reflection",
    backend: BackendEnum = BackendEnum.SAT,
    task: Optional[TaskEnum] = None,
    workers: Optional[int] = None,
    seed: int = 0,
    budget: Optional[int] = None,
    out: Optional[Path] = None,
) -> EvaluationRun:
    """Evaluate a checkpoint on a corpus with one selector"""
    spec = parse_selector(selector, default_budget=budget or get_settings().zeroth_order_budget)
    model = ReflModel.load(checkpoint)
    check_compatible(model, task=task)
    examples = load_task_examples(model, data, BackendEnum(backend))
    run = evaluate_examples(model, examples, spec, workers=workers, seed=seed)
    _emit(out, "eval", [run.metrics], run.results,
          extra={"checkpoint": str(checkpoint), "data": str(data), "selector": str(spec), "seed": seed})
    return run


def solver_only_result(example: Example) -> ExampleResult:
    """Abduce over the clue-only board, no network involved"""
    x = example.x.clue_only()
    start = time.perf_counter()
    final = example.kb.abduce(x)
    elapsed = time.perf_counter() - start
    if example.y_true is not None:
        correct = final is not None and bool(np.array_equal(final.values, example.y_true.values))
    else:
        correct = final is not None and example.kb.is_solution(final)
    return ExampleResult(
        input_id=example.example_id,
        flagged_count=0,
        fallback_used=False,
        correct=correct,
        raw_correct=False,
        network_seconds=0.0,
        abduction_seconds=elapsed,
        kb_query_count=1,
        blanks=x.blank_count,
        clue_blanks=x.blank_count,
    )


@log_performance
def cmd_bench_solvers(
    data: Path,
    backends: Sequence[BackendEnum] = (BackendEnum.SAT, BackendEnum.CSP),
    modes: Sequence[str] = (SOLVER_ONLY, REFL),
    checkpoint: Optional[Path] = None,
    workers: Optional[int] = None,
    seed: int = 0,
    out: Optional[Path] = None,
) -> List[RunMetrics]:
    """
    Abduction cost per backend: solver-only (clue-only boards) against refl
    (the trained model's reflected output)
    """
    unknown = [m for m in modes if m not in (SOLVER_ONLY, REFL)]
    if unknown:
        raise ValueError(f"unknown bench modes {unknown}; expected {SOLVER_ONLY} or {REFL}")
    if REFL in modes and checkpoint is None:
        raise ValueError("refl mode needs a trained checkpoint (--checkpoint)")

    records = CorpusLoader().load_sudoku_csv(data)
    model = ReflModel.load(checkpoint) if REFL in modes else None
    if model is not None and records:
        check_compatible(model, task=TaskEnum.SUDOKU, side=records[0].side)

    rows: List[RunMetrics] = []
    all_results: List[ExampleResult] = []
    for backend in backends:
        backend = BackendEnum(backend)
        examples = sudoku_examples(records, backend, prefix=Path(data).stem)
        if SOLVER_ONLY in modes:
            results = [solver_only_result(ex) for ex in examples]
            rows.append(MetricsAccumulator.of(results).finalize(f"{backend.value}/{SOLVER_ONLY}"))
            all_results.extend(results)
        if REFL in modes:
            run = evaluate_examples(model, examples, SelectorSpec(kind=SelectorKind.REFLECTION),
                                    label=f"{backend.value}/{REFL}", workers=workers, seed=seed)
            rows.append(run.metrics)
            all_results.extend(run.results)
    for row in rows:
        logger.info("solver_bench_row", label=row.label, abduction_seconds=row.mean_abduction_seconds,
                    blanks=row.mean_blanks, accuracy=row.accuracy)
    _emit(out, "bench_solvers", rows, all_results, extra={"data": str(data), "seed": seed})
    return rows


def solver_set_result(example: Example) -> ExampleResult:
    """Exact abduction from an all-blank input, scored against the oracle"""
    start = time.perf_counter()
    final = example.kb.abduce(blank_input(example.x.n))
    elapsed = time.perf_counter() - start
    size = len(final.node_set()) if final is not None else 0
    feasible = final is not None and example.kb.measure(final).fully_consistent
    ratio = size / example.optimum if feasible and example.optimum else 0.0
    return ExampleResult(
        input_id=example.example_id,
        flagged_count=0,
        fallback_used=False,
        correct=ratio >= 1.0,
        raw_correct=False,
        network_seconds=0.0,
        abduction_seconds=elapsed,
        kb_query_count=1,
        blanks=example.x.n,
        set_size=size,
        optimum=example.optimum,
        approx_ratio=ratio,
    )


@log_performance
def cmd_graph_bench(
    task: TaskEnum,
    data: Optional[Path] = None,
    count: int = 20,
    sizes: Sequence[int] = (10, 15, 20),
    ps: Sequence[float] = (0.3, 0.5),
    seed: int = 0,
    checkpoint: Optional[Path] = None,
    selector: str = "reflection",
    workers: Optional[int] = None,
    budget: Optional[int] = None,
    out: Optional[Path] = None,
) -> RunMetrics:
    """
    Approximation ratio against the Bron-Kerbosch oracle

    Graphs come from data, or from the Erdos-Renyi generator when data is None.
    Without a checkpoint the knowledge base's exact solver is scored instead.
    """
    task = TaskEnum(task)
    if task == TaskEnum.SUDOKU:
        raise ValueError("graph-bench takes task clique or mis")
    graphs = CorpusLoader().load_graphs(data) if data is not None else generate_graph_corpus(count, sizes, ps, seed)
    examples = graph_examples(graphs, task)

    if checkpoint is not None:
        model = ReflModel.load(checkpoint)
        check_compatible(model, task=task)
        spec = parse_selector(selector, default_budget=budget or get_settings().zeroth_order_budget)
        run = evaluate_examples(model, examples, spec, label=f"{task.value}/{spec}", workers=workers, seed=seed)
        metrics, results = run.metrics, run.results
    else:
        results = [solver_set_result(ex) for ex in examples]
        metrics = MetricsAccumulator.of(results).finalize(f"{task.value}/solver")

    logger.info("graph_bench_completed", task=task.value, graphs=len(graphs), approx_ratio=metrics.approx_ratio)
    _emit(out, "graph_bench", [metrics], results,
          extra={"task": task.value, "data": str(data) if data else None, "seed": seed})
    return metrics


@log_performance
def cmd_sweep(
    config_path: Path,
    key: str,
    values: Sequence[str],
    checkpoint: Optional[Path] = None,
    data: Optional[Path] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    out: Optional[Path] = None,
) -> List[RunMetrics]:
    """
    One table row per value of a single knob

    key "retain" evaluates an existing checkpoint with confidence:<value>
    selectors next to a reflection row; any other key is a TrainConfig field,
    retrained per value into out_dir/<key>=<value> and evaluated on test_data
    (or val_data) with the reflection selector.
    """
    if not values:
        raise ValueError("sweep needs at least one value")
    rows: List[RunMetrics] = []

    if key == "retain":
        if checkpoint is None or data is None:
            raise ValueError("a retain sweep needs --checkpoint and --data")
        model = ReflModel.load(checkpoint)
        examples = load_task_examples(model, data)
        rows.append(evaluate_examples(model, examples, SelectorSpec(kind=SelectorKind.REFLECTION),
                                      workers=workers, seed=seed or 0).metrics)
        for value in values:
            spec = parse_selector(f"confidence:{value}")
            rows.append(evaluate_examples(model, examples, spec, workers=workers, seed=seed or 0).metrics)
    else:
        base = load_train_config(config_path, seed=seed)
        if key not in TrainConfig.model_fields:
            raise ConfigError(f"unknown config keys: {key}")
        target = base.test_data or base.val_data
        if target is None:
            raise ConfigError("a training sweep needs test_data or val_data in the config")
        for value in values:
            overrides = {key: str(value), "out_dir": str(Path(base.out_dir) / f"{key}={value}")}
            trained = cmd_train(config_path, overrides, seed=seed, workers=workers)
            model = ReflModel.load(trained.train.checkpoint)
            examples = load_examples(trained.config, target, 1.0)
            run = evaluate_examples(model, examples, SelectorSpec(kind=SelectorKind.REFLECTION),
                                    label=f"{key}={value}", workers=workers, seed=trained.config.seed)
            rows.append(run.metrics)

    _emit(out, f"sweep_{key}", rows, extra={"key": key, "values": [str(v) for v in values]})
    return rows


@log_performance
def cmd_generate(
    kind: str,
    out: Path,
    seed: int = 0,
    count: int = 100,
    side: int = 4,
    clues: int = 8,
    sizes: Sequence[int] = (10, 15, 20),
    ps: Sequence[float] = (0.3, 0.5),
) -> Path:
    """Write a generated corpus and its manifest; returns the corpus path"""
    loader = CorpusLoader()
    out = Path(out)
    if kind == "sudoku":
        records = generate_sudoku(side, clues, count, seed)
        loader.write_sudoku_csv(records, out)
        parameters: Dict[str, Any] = {"side": side, "clues": clues, "count": count}
        record_count = len(records)
    elif kind == "graphs":
        graphs = generate_graph_corpus(count, sizes, ps, seed)
        loader.write_graphs(graphs, out)
        parameters = {"count": count, "sizes": list(sizes), "ps": list(ps)}
        record_count = len(graphs)
    else:
        raise ValueError(f"unknown corpus kind {kind!r}; expected sudoku or graphs")
    loader.write_manifest(out, kind, seed, parameters, record_count)
    logger.info("corpus_generated", kind=kind, path=str(out), records=record_count)
    return out
