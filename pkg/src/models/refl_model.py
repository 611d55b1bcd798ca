"""
Reflection model: message-passing body, output head and reflection head
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple
import numpy as np
import src.autodiff as ad
from src.autodiff import ParameterSet, Tensor
from src.config.constants import BLANK, DEGREE_CAP, FLAG_THRESHOLD, GRAPH_DIM, MESSAGE_ROUNDS, SUDOKU_DIM
from src.config.train_config import TaskEnum, TrainConfig
from src.knowledge.base import Assignment
from src.models.graphs import ConstraintGraph, ModelError
from src.utils.logger import LoggerMixin


@dataclass
class ForwardResult:
    """Cell logits and flag logits for one input, kept as tape tensors"""
    cell_logits: Tensor
    flag_logits: Tensor

    @property
    def cell_probs(self) -> np.ndarray:
        v = self.cell_logits.values
        e = np.exp(v - v.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)

    @property
    def flag_probs(self) -> np.ndarray:
        z = self.flag_logits.values[:, 0]
        e = np.exp(-np.abs(z))
        return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))

    @property
    def n(self) -> int:
        return self.cell_logits.shape[0]


class ReflModel(LoggerMixin):
    """
    f = (f1, f2, R)

    f1 embeds each node's input symbol and runs T rounds of mean-aggregated
    message passing with a skip to the initial embedding. f2 maps the final
    embeddings to per-node symbol logits and R maps the same embeddings to one
    flag logit per node. There are no positional features, so outputs are
    equivariant under graph automorphisms.
    """

    def __init__(
        self,
        task: TaskEnum,
        n_symbols: int,
        vocab: int,
        d: int,
        T: int,
        seed: int = 0,
        side: Optional[int] = None,
        degree_cap: Optional[int] = None,
    ):
        if d < 1 or T < 1 or n_symbols < 2 or vocab < 1:
            raise ModelError(f"invalid architecture d={d} T={T} n_symbols={n_symbols} vocab={vocab}")
        self.task = TaskEnum(task)
        self.n_symbols = n_symbols
        self.vocab = vocab
        self.d = d
        self.T = T
        self.seed = seed
        self.side = side
        self.degree_cap = degree_cap
        self.params = ParameterSet()
        self._init_params(np.random.default_rng(seed))

    @classmethod
    def for_sudoku(cls, side: int, d: int = SUDOKU_DIM, T: int = MESSAGE_ROUNDS, seed: int = 0) -> "ReflModel":
        return cls(TaskEnum.SUDOKU, n_symbols=side, vocab=side + 1, d=d, T=T, seed=seed, side=side)

    @classmethod
    def for_graphs(cls, task: TaskEnum, d: int = GRAPH_DIM, T: int = MESSAGE_ROUNDS,
                   seed: int = 0, degree_cap: int = DEGREE_CAP) -> "ReflModel":
        """Node-membership model; |Y| = 2 (out, in)"""
        return cls(task, n_symbols=2, vocab=degree_cap + 1, d=d, T=T, seed=seed, degree_cap=degree_cap)

    @classmethod
    def from_config(cls, config: TrainConfig) -> "ReflModel":
        if config.task == TaskEnum.SUDOKU:
            return cls.for_sudoku(config.side, d=config.d, T=config.T, seed=config.seed)
        return cls.for_graphs(config.task, d=config.d, T=config.T, seed=config.seed,
                              degree_cap=config.degree_cap)

    def _init_params(self, rng: np.random.Generator) -> None:
        d = self.d

        def uniform(fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
            bound = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-bound, bound, size=shape)

        self.params.add("embed", uniform(self.vocab, (self.vocab, d)))
        for t in range(self.T):
            self.params.add(f"mp{t}.msg_w", uniform(d, (d, d)))
            self.params.add(f"mp{t}.upd_w", uniform(3 * d, (3 * d, d)))
            self.params.add(f"mp{t}.upd_b", np.zeros(d))
        self.params.add("out.w", uniform(d, (d, self.n_symbols)))
        self.params.add("out.b", np.zeros(self.n_symbols))
        self.params.add("refl.w", uniform(d, (d, 1)))
        self.params.add("refl.b", np.zeros(1))

    @property
    def arch(self) -> Dict[str, Any]:
        return {
            "task": self.task.value,
            "n_symbols": self.n_symbols,
            "vocab": self.vocab,
            "d": self.d,
            "T": self.T,
            "side": self.side,
            "degree_cap": self.degree_cap,
        }

    def input_symbols(self, x: Assignment, graph: ConstraintGraph) -> np.ndarray:
        """Embedding indices: clue symbols for Sudoku, clipped degrees for graph tasks"""
        if self.task == TaskEnum.SUDOKU:
            return x.values
        return np.minimum([graph.degree(v) for v in range(graph.node_count)], self.degree_cap)

    def forward(self, x: Assignment, graph: ConstraintGraph) -> ForwardResult:
        """
        Evaluate the model on one input

        Records onto the active Tape when one is open.
        """
        if x.n != graph.node_count:
            raise ModelError(f"input has {x.n} positions, graph has {graph.node_count} nodes")
        if graph.node_count == 0:
            raise ModelError("empty graph")
        p = self.params
        symbols = self.input_symbols(x, graph)
        if int(np.max(symbols)) >= self.vocab:
            raise ModelError(f"input symbol {int(np.max(symbols))} outside the embedding table")
        adjacency = ad.constant(graph.mean_adjacency())
        h0 = ad.embedding(p["embed"], symbols)
        h = h0
        for t in range(self.T):
            messages = ad.matmul(adjacency, ad.matmul(h, p[f"mp{t}.msg_w"]))
            joined = ad.concat([h, messages, h0], axis=1)
            h = ad.relu(ad.add(ad.matmul(joined, p[f"mp{t}.upd_w"]), p[f"mp{t}.upd_b"]))
        cell_logits = ad.add(ad.matmul(h, p["out.w"]), p["out.b"])
        flag_logits = ad.add(ad.matmul(h, p["refl.w"]), p["refl.b"])
        return ForwardResult(cell_logits, flag_logits)

    def save(self, path: Path) -> None:
        ad.save_checkpoint(path, self.params, self.arch)
        self.logger.info("checkpoint_saved", path=str(path), parameters=self.params.total_size())

    @classmethod
    def load(cls, path: Path) -> "ReflModel":
        """Rebuild a model from a checkpoint's architecture line and parameters"""
        try:
            arch, state = ad.load_checkpoint(path)
        except (OSError, ValueError, ad.CheckpointError) as e:
            raise ModelError(f"cannot read checkpoint {path}: {e}") from e
        try:
            model = cls(
                TaskEnum(arch["task"]), n_symbols=arch["n_symbols"], vocab=arch["vocab"],
                d=arch["d"], T=arch["T"], side=arch.get("side"), degree_cap=arch.get("degree_cap"),
            )
            model.params.load_state(state)
        except (KeyError, ValueError, ad.ShapeError) as e:
            raise ModelError(f"checkpoint {path} does not describe a valid model: {e}") from e
        return model


def decode(
    fr: ForwardResult,
    mode: str = "argmax",
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[Assignment, np.ndarray]:
    """
    Turn a forward result into (y_hat, r)

    Args:
        fr: Forward result
        mode: "argmax" (ties to the lowest symbol, flag iff p >= 0.5) or "sample"
        seed: Seed for sample mode when no generator is passed
        rng: Generator to draw from in sample mode

    Returns:
        y_hat with 1-based symbols and the 0/1 reflection vector
    """
    probs = fr.cell_probs
    flags = fr.flag_probs
    if mode == "argmax":
        labels = np.argmax(probs, axis=1)
        r = (flags >= FLAG_THRESHOLD).astype(np.int64)
    elif mode == "sample":
        rng = rng if rng is not None else np.random.default_rng(seed)
        cumulative = np.cumsum(probs, axis=1)
        u = rng.random(fr.n)
        labels = np.minimum((cumulative < u[:, None]).sum(axis=1), probs.shape[1] - 1)
        r = (rng.random(fr.n) < flags).astype(np.int64)
    else:
        raise ModelError(f"unknown decode mode {mode!r}")
    return Assignment(labels + 1), r


def joint_log_prob(fr: ForwardResult, y_hat: Assignment, r: np.ndarray) -> Tensor:
    """
    log f(y_hat, r | x) under per-position independence

    Sum of the categorical log-probabilities of y_hat and the Bernoulli
    log-probabilities of r, as a differentiable scalar.
    """
    if y_hat.blank_count:
        raise ModelError("y_hat must be complete to score its log-probability")
    k = fr.cell_logits.shape[1]
    cell_term = ad.sum(ad.multiply(
        ad.log_softmax(fr.cell_logits), ad.constant(ad.one_hot(y_hat.values - 1, k))
    ))
    two_way = ad.concat([ad.constant(np.zeros((fr.n, 1))), fr.flag_logits], axis=1)
    flag_term = ad.sum(ad.multiply(
        ad.log_softmax(two_way), ad.constant(ad.one_hot(np.asarray(r, dtype=np.int64), 2))
    ))
    return ad.add(cell_term, flag_term)


def blank_input(n: int) -> Assignment:
    """Clue-free input for node-membership tasks"""
    return Assignment(np.full(n, BLANK, dtype=np.int64))
