"""
Data models for reflx corpora
"""

import math
import networkx as nx
from typing import Any, Dict, FrozenSet, List, Tuple
from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator
from src.utils.validators import infer_side, validate_digit_string


class DatasetError(Exception):
    """Malformed dataset file or record"""
    pass


def rule_violations(board: str, side: int) -> List[str]:
    """
    Direct rule check of a board string, independent of the knowledge package

    Args:
        board: Digit string, '0' marks a blank
        side: 4 or 9

    Returns:
        Names of the rows, columns and boxes holding a repeated digit
    """
    box = math.isqrt(side)
    groups: Dict[str, List[str]] = {}
    for i, ch in enumerate(board):
        if ch == "0":
            continue
        r, c = divmod(i, side)
        for key in (f"row {r}", f"column {c}", f"box {(r // box) * box + c // box}"):
            groups.setdefault(key, []).append(ch)
    return [key for key, digits in groups.items() if len(digits) != len(set(digits))]


class SudokuRecord(BaseModel):
    """A puzzle ('0' = blank) with its solution"""
    puzzle: str
    solution: str

    @property
    def side(self) -> int:
        return infer_side(len(self.puzzle))

    @property
    def clue_count(self) -> int:
        return sum(ch != "0" for ch in self.puzzle)

    @model_validator(mode="after")
    def check_consistency(self) -> "SudokuRecord":
        side = infer_side(len(self.puzzle))
        if side is None:
            raise ValueError(f"puzzle length {len(self.puzzle)} is not a 4x4 or 9x9 board")
        for field_name, text, allow_blank in (("puzzle", self.puzzle, True), ("solution", self.solution, False)):
            reason = validate_digit_string(text, side, allow_blank)
            if reason:
                raise ValueError(f"{field_name}: {reason}")
        broken = rule_violations(self.solution, side)
        if broken:
            raise ValueError(f"solution repeats a digit in {', '.join(broken)}")
        mismatched = [i for i, (p, s) in enumerate(zip(self.puzzle, self.solution)) if p != "0" and p != s]
        if mismatched:
            raise ValueError(f"solution disagrees with clues at cells {mismatched}")
        return self


class Graph(BaseModel):
    """Undirected simple graph on nodes 0..node_count-1"""
    node_count: int = Field(ge=0)
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    name: str = ""

    _adjacency: List[FrozenSet[int]] = PrivateAttr(default_factory=list)

    @field_validator("edges")
    @classmethod
    def normalize_edges(cls, v: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        normalized = set()
        for u, w in v:
            if u == w:
                raise ValueError(f"self-loop on node {u}")
            edge = (min(u, w), max(u, w))
            if edge in normalized:
                raise ValueError(f"duplicate edge {edge}")
            normalized.add(edge)
        return sorted(normalized)

    @model_validator(mode="after")
    def check_endpoints(self) -> "Graph":
        out_of_range = [e for e in self.edges if e[0] < 0 or e[1] >= self.node_count]
        if out_of_range:
            raise ValueError(f"edges with endpoints outside 0..{self.node_count - 1}: {out_of_range[:5]}")
        return self

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> List[FrozenSet[int]]:
        """Neighbor set per node, built on first use"""
        if len(self._adjacency) != self.node_count:
            neighbors = [set() for _ in range(self.node_count)]
            for u, w in self.edges:
                neighbors[u].add(w)
                neighbors[w].add(u)
            self._adjacency = [frozenset(s) for s in neighbors]
        return self._adjacency

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.adjacency[u]

    def degrees(self) -> List[int]:
        return [len(s) for s in self.adjacency]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.node_count))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph, name: str = "") -> "Graph":
        """Nodes are relabeled 0..n-1 in sorted order"""
        index = {v: i for i, v in enumerate(sorted(g.nodes))}
        return cls(node_count=len(index), edges=[(index[u], index[v]) for u, v in g.edges], name=name)


class CorpusManifest(BaseModel):
    """Sidecar describing how a generated corpus was produced"""
    kind: str
    seed: int
    parameters: Dict[str, Any] = Field(default_factory=dict)
    record_count: int
    sha256: str
    tool_version: str
