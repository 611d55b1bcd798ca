"""
Training objective: supervised, consistency (REINFORCE) and reflection-size losses
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence
import numpy as np
import src.autodiff as ad
from src.autodiff import NonFiniteError, Tensor
from src.config.constants import BASELINE_DECAY
from src.config.train_config import TrainConfig
from src.knowledge.base import Assignment, KnowledgeBase
from src.models.refl_model import ForwardResult, ReflModel, decode, joint_log_prob
from src.reflection.evaluation import Example
from src.reflection.reflect import apply_reflection


class RewardBaseline:
    """Exponential moving average of delta-Con, updated after each reward is taken"""

    def __init__(self, decay: float = BASELINE_DECAY, value: float = 0.0):
        self.decay = decay
        self.value = value

    def update(self, delta: float) -> None:
        self.value = self.decay * self.value + (1.0 - self.decay) * float(delta)
        if not np.isfinite(self.value):
            raise NonFiniteError("reward baseline became non-finite")


def delta_con(y_hat: Assignment, r, x: Assignment, kb: KnowledgeBase) -> int:
    """
    Con(y_hat') - Con(y_hat), with y_hat' from apply_reflection

    Both sides carry x's clue values, so an all-zero r always gives 0.
    """
    reflected = apply_reflection(x, y_hat, r)
    unreflected = apply_reflection(x, y_hat, np.zeros(y_hat.n, dtype=np.int64))
    return kb.consistency(reflected).points - kb.consistency(unreflected).points


@dataclass
class ConsistencyTerm:
    loss: Tensor
    delta: int
    reward: float
    r: np.ndarray


def loss_con(
    fr: ForwardResult,
    x: Assignment,
    kb: KnowledgeBase,
    rng: np.random.Generator,
    baseline: RewardBaseline,
) -> ConsistencyTerm:
    """
    REINFORCE consistency loss for one sampled (y_hat, r)

    The reward (delta-Con minus the baseline) enters as a constant, so
    gradients flow only through log f(y_hat, r | x).
    """
    y_hat, r = decode(fr, "sample", rng=rng)
    delta = delta_con(y_hat, r, x, kb)
    reward = float(delta) - baseline.value
    log_prob = joint_log_prob(fr, y_hat, r)
    loss = ad.multiply(log_prob, ad.constant(-reward))
    baseline.update(delta)
    return ConsistencyTerm(loss, delta, reward, r)


def loss_size(flag_probs: Tensor, c: float) -> Tensor:
    """max(0, C - mean(1 - p))^2 over per-position flag probabilities p"""
    excess = ad.add(ad.mean(flag_probs), ad.constant(c - 1.0))
    return ad.square(ad.relu(excess))


def loss_labeled(cell_logits: Tensor, y_true: Assignment) -> Tensor:
    """Mean cross-entropy over all positions; symbols are 1-based"""
    return ad.cross_entropy(cell_logits, y_true.values - 1)


def _sum_all(terms: Sequence[Tensor]) -> Tensor:
    total = terms[0]
    for t in terms[1:]:
        total = ad.add(total, t)
    return total


@dataclass
class LossBreakdown:
    total: Tensor
    labeled: float = 0.0
    consistency: float = 0.0
    size: float = 0.0
    mean_delta: float = 0.0
    mean_flag_prob: float = 0.0
    labeled_count: int = 0
    deltas: List[int] = field(default_factory=list)


def total_loss(
    model: ReflModel,
    batch: Sequence[Example],
    config: TrainConfig,
    rng: np.random.Generator,
    baseline: Optional[RewardBaseline] = None,
) -> LossBreakdown:
    """
    Semi-supervised objective for one batch

    Mean supervised loss over the labeled examples, plus the mean over every
    example of alpha * L_con + beta * L_size. Terms with a zero weight are
    not computed.
    """
    if not batch:
        raise ValueError("empty batch")
    baseline = baseline if baseline is not None else RewardBaseline()
    labeled_terms: List[Tensor] = []
    other_terms: List[Tensor] = []
    con_values, size_values, deltas, flag_means = [], [], [], []

    for ex in batch:
        fr = model.forward(ex.x, ex.graph)
        flag_probs = ad.sigmoid(fr.flag_logits)
        flag_means.append(float(flag_probs.values.mean()))
        if ex.labeled and ex.y_true is not None:
            labeled_terms.append(loss_labeled(fr.cell_logits, ex.y_true))
        if config.alpha > 0:
            term = loss_con(fr, ex.x, ex.kb, rng, baseline)
            con_values.append(term.loss.item())
            deltas.append(term.delta)
            other_terms.append(ad.multiply(term.loss, ad.constant(config.alpha)))
        if config.beta > 0:
            size = loss_size(flag_probs, config.c)
            size_values.append(size.item())
            other_terms.append(ad.multiply(size, ad.constant(config.beta)))

    parts: List[Tensor] = []
    if labeled_terms:
        parts.append(ad.multiply(_sum_all(labeled_terms), ad.constant(1.0 / len(labeled_terms))))
    if other_terms:
        parts.append(ad.multiply(_sum_all(other_terms), ad.constant(1.0 / len(batch))))
    total = _sum_all(parts) if parts else ad.constant(0.0)

    return LossBreakdown(
        total=total,
        labeled=float(np.mean([t.item() for t in labeled_terms])) if labeled_terms else 0.0,
        consistency=float(np.mean(con_values)) if con_values else 0.0,
        size=float(np.mean(size_values)) if size_values else 0.0,
        mean_delta=float(np.mean(deltas)) if deltas else 0.0,
        mean_flag_prob=float(np.mean(flag_means)),
        labeled_count=len(labeled_terms),
        deltas=deltas,
    )
