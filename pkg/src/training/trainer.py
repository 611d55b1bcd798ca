"""
Training loop
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence
import numpy as np
from pydantic import BaseModel
from src.autodiff import NonFiniteError, Tape, adam_update, backpropagate
from src.config.train_config import TaskEnum, TrainConfig
from src.models.refl_model import ReflModel
from src.reflection.evaluation import Example, ExampleResult, evaluate_example
from src.reflection.pipeline import ReflectionPipeline
from src.reflection.selectors import SelectorKind, SelectorSpec
from src.training.dataset import load_examples
from src.training.losses import LossBreakdown, RewardBaseline, total_loss
from src.utils.logger import LoggerMixin, log_performance

CHECKPOINT_NAME = "model.ckpt"
METRICS_NAME = "metrics.jsonl"


class TrainingDivergedError(Exception):
    """The loss or a gradient became non-finite"""
    pass


class EpochRecord(BaseModel):
    """One line of the training curve"""
    epoch: int
    loss: float
    labeled_loss: float
    consistency_loss: float
    size_loss: float
    mean_delta_con: float
    mean_flag_prob: float
    baseline: float
    val_score: Optional[float] = None
    val_accuracy: Optional[float] = None
    val_raw_accuracy: Optional[float] = None
    val_mean_flags: Optional[float] = None
    elapsed_seconds: float = 0.0


@dataclass
class TrainResult:
    model: ReflModel
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    best_score: Optional[float] = None
    checkpoint: Optional[Path] = None


def validation_score(task: TaskEnum, results: Sequence[ExampleResult]) -> float:
    """Board accuracy for Sudoku, mean approximation ratio for graph tasks"""
    if not results:
        return 0.0
    if task == TaskEnum.SUDOKU:
        return float(np.mean([r.correct for r in results]))
    return float(np.mean([r.approx_ratio or 0.0 for r in results]))


class Trainer(LoggerMixin):
    """
    Single-writer training loop: shuffled batches, Adam steps, periodic
    validation with the full pipeline, best-by-validation checkpointing
    """

    def __init__(
        self,
        config: TrainConfig,
        model: Optional[ReflModel] = None,
        train_examples: Optional[List[Example]] = None,
        val_examples: Optional[List[Example]] = None,
    ):
        self.config = config
        if train_examples is None:
            config.check_paths()
            train_examples = load_examples(config, config.train_data, config.labeled_fraction)
            if val_examples is None and config.val_data is not None:
                val_examples = load_examples(config, config.val_data, 1.0)
        if not train_examples:
            raise ValueError("training set is empty")
        self.train_examples = train_examples
        self.val_examples = val_examples or []
        self.model = model or ReflModel.from_config(config)
        self.rng = np.random.default_rng(config.seed)
        self.baseline = RewardBaseline()
        self.out_dir = Path(config.out_dir)

    def _step(self, batch: Sequence[Example], epoch: int, index: int) -> LossBreakdown:
        params = self.model.params
        try:
            with Tape() as tape:
                breakdown = total_loss(self.model, batch, self.config, self.rng, self.baseline)
            loss = breakdown.total.item()
            if not np.isfinite(loss):
                raise NonFiniteError(f"loss {loss}")
            if breakdown.total.requires_grad:
                grads = backpropagate(tape, breakdown.total, params)
                adam_update(params, grads, lr=self.config.lr)
        except NonFiniteError as e:
            self.logger.error("training_diverged", epoch=epoch, batch=index, error=str(e))
            raise TrainingDivergedError(
                f"epoch {epoch} batch {index}: {e} "
                f"(baseline={self.baseline.value:.4g}, step={params.step})"
            ) from e
        return breakdown

    def train_epoch(self, epoch: int) -> EpochRecord:
        start = time.perf_counter()
        order = self.rng.permutation(len(self.train_examples))
        size = self.config.batch
        parts: List[LossBreakdown] = []
        for index, lo in enumerate(range(0, len(order), size)):
            batch = [self.train_examples[i] for i in order[lo:lo + size]]
            parts.append(self._step(batch, epoch, index))
        all_deltas = [d for p in parts for d in p.deltas]
        return EpochRecord(
            epoch=epoch,
            loss=float(np.mean([p.total.item() for p in parts])),
            labeled_loss=float(np.mean([p.labeled for p in parts])),
            consistency_loss=float(np.mean([p.consistency for p in parts])),
            size_loss=float(np.mean([p.size for p in parts])),
            mean_delta_con=float(np.mean(all_deltas)) if all_deltas else 0.0,
            mean_flag_prob=float(np.mean([p.mean_flag_prob for p in parts])),
            baseline=self.baseline.value,
            elapsed_seconds=time.perf_counter() - start,
        )

    def validate(self, examples: Sequence[Example]) -> List[ExampleResult]:
        pipeline = ReflectionPipeline(self.model, SelectorSpec(kind=SelectorKind.REFLECTION), seed=self.config.seed)
        return [evaluate_example(pipeline, ex) for ex in examples]

    @log_performance
    def fit(self) -> TrainResult:
        """
        Run all epochs

        Returns:
            The trained model, the per-epoch curve and where the best checkpoint went
        """
        self.out_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = self.out_dir / METRICS_NAME
        metrics_path.write_text("", encoding="utf-8")
        checkpoint = self.out_dir / CHECKPOINT_NAME
        result = TrainResult(model=self.model, checkpoint=checkpoint)
        self.logger.info(
            "training_started",
            task=self.config.task.value,
            train=len(self.train_examples),
            labeled=sum(ex.labeled for ex in self.train_examples),
            val=len(self.val_examples),
            parameters=self.model.params.total_size(),
        )

        for epoch in range(self.config.epochs):
            record = self.train_epoch(epoch)
            last = epoch == self.config.epochs - 1
            if self.val_examples and (epoch % self.config.eval_every == 0 or last):
                results = self.validate(self.val_examples)
                record.val_score = validation_score(self.config.task, results)
                record.val_accuracy = float(np.mean([r.correct for r in results]))
                record.val_raw_accuracy = float(np.mean([r.raw_correct for r in results]))
                record.val_mean_flags = float(np.mean([r.flagged_count for r in results]))
                if result.best_score is None or record.val_score > result.best_score:
                    result.best_score = record.val_score
                    result.best_epoch = epoch
                    self.model.save(checkpoint)
            elif not self.val_examples:
                result.best_epoch = epoch
                self.model.save(checkpoint)

            with open(metrics_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record.model_dump()) + "\n")
            result.history.append(record)
            self.logger.info("epoch_completed", **record.model_dump(exclude_none=True))

        self.logger.info("training_completed", best_epoch=result.best_epoch, best_score=result.best_score)
        return result


def train(config: TrainConfig) -> TrainResult:
    """Train from a config whose data paths point at corpora on disk"""
    return Trainer(config).fit()
