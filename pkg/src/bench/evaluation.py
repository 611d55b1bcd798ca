"""
Evaluation over a set of examples, optionally fanned out across worker processes
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import numpy as np
from src.config.settings import get_settings
from src.models.refl_model import ReflModel
from src.reflection.evaluation import Example, ExampleResult, evaluate_example
from src.reflection.pipeline import ReflectionPipeline
from src.reflection.selectors import SelectorSpec
from src.bench.metrics import MetricsAccumulator, RunMetrics
from src.utils.logger import get_logger

logger = get_logger("bench.evaluation")


@dataclass
class EvaluationRun:
    metrics: RunMetrics
    results: List[ExampleResult]


def _evaluate_chunk(
    model: ReflModel, selector: SelectorSpec, seed: int, examples: Sequence[Example]
) -> Tuple[MetricsAccumulator, List[ExampleResult]]:
    pipeline = ReflectionPipeline(model, selector, seed=seed)
    results = [evaluate_example(pipeline, ex) for ex in examples]
    return MetricsAccumulator.of(results), results


def _chunks(items: Sequence[Example], parts: int) -> List[Sequence[Example]]:
    bounds = np.linspace(0, len(items), parts + 1).astype(int)
    return [items[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def evaluate_examples(
    model: ReflModel,
    examples: Sequence[Example],
    selector: SelectorSpec,
    label: Optional[str] = None,
    workers: Optional[int] = None,
    seed: int = 0,
) -> EvaluationRun:
    """
    Run the pipeline with one selector over every example

    With workers > 1 the examples are split into contiguous chunks evaluated in
    separate processes; per-example results keep input order and the chunk
    accumulators are merged, so the metrics do not depend on the worker count.
    """
    workers = workers or get_settings().workers
    examples = list(examples)
    label = label or str(selector)
    if workers <= 1 or len(examples) < 2:
        acc, results = _evaluate_chunk(model, selector, seed, examples)
    else:
        chunks = _chunks(examples, min(workers, len(examples)))
        acc, results = MetricsAccumulator(), []
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(_evaluate_chunk, model, selector, seed, chunk) for chunk in chunks]
            for future in futures:
                part_acc, part_results = future.result()
                acc = acc.merge(part_acc)
                results.extend(part_results)
    metrics = acc.finalize(label)
    logger.info(
        "evaluation_completed",
        label=label,
        examples=metrics.examples,
        accuracy=metrics.accuracy,
        raw_accuracy=metrics.raw_accuracy,
        workers=workers,
    )
    return EvaluationRun(metrics, results)
