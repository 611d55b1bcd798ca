"""
Building model-ready examples from corpora
"""

from pathlib import Path
from typing import List, Optional, Sequence
import numpy as np
from src.config.train_config import BackendEnum, ConsistencyModeEnum, TaskEnum, TrainConfig
from src.data.loader import CorpusLoader
from src.data.models import DatasetError, Graph, SudokuRecord
from src.data.oracles import oracle_max_clique, oracle_max_independent_set
from src.knowledge.base import Assignment
from src.knowledge.graph_kb import GraphKB
from src.knowledge.sudoku import SudokuKB
from src.models.graphs import build_sudoku_graph, graph_to_constraint_graph
from src.models.refl_model import blank_input
from src.reflection.evaluation import Example


def labeled_mask(count: int, labeled_fraction: float, seed: int) -> np.ndarray:
    """Seeded choice of round(count * fraction) labeled examples (at least one)"""
    mask = np.zeros(count, dtype=bool)
    if count == 0:
        return mask
    k = min(count, max(1, int(round(count * labeled_fraction))))
    mask[np.random.default_rng(seed).permutation(count)[:k]] = True
    return mask


def sudoku_examples(
    records: Sequence[SudokuRecord],
    backend: BackendEnum = BackendEnum.SAT,
    consistency: ConsistencyModeEnum = ConsistencyModeEnum.GRADED,
    labeled_fraction: float = 1.0,
    seed: int = 0,
    prefix: str = "sudoku",
) -> List[Example]:
    """All records must share one board size; the graph and KB are shared"""
    if not records:
        return []
    side = records[0].side
    mixed = [i for i, r in enumerate(records) if r.side != side]
    if mixed:
        raise ValueError(f"records {mixed[:5]} differ in board size from record 0 ({side}x{side})")
    graph = build_sudoku_graph(side)
    kb = SudokuKB(side, backend=backend, mode=consistency)
    labeled = labeled_mask(len(records), labeled_fraction, seed)
    return [
        Example(
            example_id=f"{prefix}-{i}",
            task=TaskEnum.SUDOKU,
            x=Assignment.from_string(rec.puzzle),
            graph=graph,
            kb=kb,
            y_true=Assignment.from_string(rec.solution, clues=False),
            labeled=bool(labeled[i]),
        )
        for i, rec in enumerate(records)
    ]


def graph_examples(
    graphs: Sequence[Graph],
    task: TaskEnum,
    consistency: ConsistencyModeEnum = ConsistencyModeEnum.GRADED,
    labeled_fraction: float = 1.0,
    seed: int = 0,
    prefix: Optional[str] = None,
) -> List[Example]:
    """
    Node-membership examples; labels and optimum sizes come from the exact oracle
    """
    task = TaskEnum(task)
    oracle = oracle_max_clique if task == TaskEnum.CLIQUE else oracle_max_independent_set
    labeled = labeled_mask(len(graphs), labeled_fraction, seed)
    examples = []
    for i, g in enumerate(graphs):
        best = oracle(g)
        examples.append(Example(
            example_id=f"{prefix or g.name or task.value}-{i}",
            task=task,
            x=blank_input(g.node_count),
            graph=graph_to_constraint_graph(g),
            kb=GraphKB(g, task, mode=consistency),
            y_true=Assignment.from_node_set(g.node_count, best),
            labeled=bool(labeled[i]),
            optimum=len(best),
        ))
    return examples


def load_examples(
    config: TrainConfig,
    path: Path,
    labeled_fraction: float = 1.0,
    loader: Optional[CorpusLoader] = None,
) -> List[Example]:
    """Load a corpus for config.task from path"""
    loader = loader or CorpusLoader()
    prefix = Path(path).stem
    if config.task == TaskEnum.SUDOKU:
        records = loader.load_sudoku_csv(path)
        if records and records[0].side != config.side:
            raise DatasetError(f"{path} holds {records[0].side}x{records[0].side} boards, config side is {config.side}")
        return sudoku_examples(records, config.backend, config.consistency, labeled_fraction, config.seed, prefix)
    return graph_examples(loader.load_graphs(path), config.task, config.consistency, labeled_fraction, config.seed)
