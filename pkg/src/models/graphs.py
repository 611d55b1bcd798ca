"""
Message-passing substrates: the Sudoku constraint graph and problem graphs
"""

from dataclasses import dataclass, field
from typing import Tuple
import numpy as np
from src.config.constants import SUDOKU_SIDES
from src.data.models import Graph
from src.knowledge.sudoku_rules import sudoku_peers


class ModelError(Exception):
    """Invalid model input, architecture or checkpoint"""
    pass


@dataclass(frozen=True)
class ConstraintGraph:
    """Symmetric, loop-free adjacency with sorted neighbor lists"""
    node_count: int
    neighbors: Tuple[Tuple[int, ...], ...]
    _mean_adjacency: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.neighbors) != self.node_count:
            raise ModelError(f"{len(self.neighbors)} neighbor lists for {self.node_count} nodes")
        matrix = np.zeros((self.node_count, self.node_count))
        for v, ns in enumerate(self.neighbors):
            if v in ns:
                raise ModelError(f"self-loop on node {v}")
            for u in ns:
                if v not in self.neighbors[u]:
                    raise ModelError(f"edge {v}-{u} is not symmetric")
            if ns:
                matrix[v, list(ns)] = 1.0 / len(ns)
        matrix.flags.writeable = False
        object.__setattr__(self, "_mean_adjacency", matrix)

    @property
    def edge_count(self) -> int:
        return sum(len(ns) for ns in self.neighbors) // 2

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def mean_adjacency(self) -> np.ndarray:
        """Row v averages over v's neighbors; isolated nodes get a zero row"""
        return self._mean_adjacency


def build_sudoku_graph(side: int) -> ConstraintGraph:
    """Cells are nodes; two cells are adjacent when they share a row, column or subgrid"""
    if side not in SUDOKU_SIDES:
        raise ModelError(f"unsupported Sudoku side {side}; expected one of {SUDOKU_SIDES}")
    peers = sudoku_peers(side)
    return ConstraintGraph(side * side, peers)


def graph_to_constraint_graph(g: Graph) -> ConstraintGraph:
    """Message passing directly over the problem graph's edges"""
    if g.node_count == 0:
        raise ModelError("cannot build a model input from an empty graph")
    return ConstraintGraph(g.node_count, tuple(tuple(sorted(ns)) for ns in g.adjacency))
