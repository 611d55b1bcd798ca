"""
Core knowledge-base types: assignments, consistency scores and the KB interface
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, List, Optional
import numpy as np
from src.config.constants import BLANK, NODE_IN, NODE_OUT
from src.config.train_config import ConsistencyModeEnum
from src.utils.logger import LoggerMixin


class KnowledgeError(Exception):
    """Malformed input to a knowledge-base operation"""
    pass


class Assignment:
    """
    A partial or complete symbolic output over n positions

    Symbols are 1-based; BLANK (0) marks an unassigned position. The clue mask
    marks positions fixed by the input x.
    """

    __slots__ = ("values", "clue_mask")

    def __init__(self, values, clue_mask=None):
        vals = np.array(values, dtype=np.int64).reshape(-1)
        mask = np.zeros(vals.shape, dtype=bool) if clue_mask is None else np.array(clue_mask, dtype=bool).reshape(-1)
        if mask.shape != vals.shape:
            raise KnowledgeError(f"clue mask length {mask.size} != assignment length {vals.size}")
        if np.any(vals < 0):
            raise KnowledgeError("negative symbol in assignment")
        vals.flags.writeable = False
        mask.flags.writeable = False
        self.values = vals
        self.clue_mask = mask

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def blank_count(self) -> int:
        return int(np.count_nonzero(self.values == BLANK))

    def is_complete(self) -> bool:
        return self.blank_count == 0

    def with_values(self, values) -> "Assignment":
        return Assignment(values, self.clue_mask)

    def clue_only(self) -> "Assignment":
        """Keep clue positions, blank everything else"""
        return Assignment(np.where(self.clue_mask, self.values, BLANK), self.clue_mask)

    @classmethod
    def from_string(cls, text: str, clues: bool = True) -> "Assignment":
        """Parse a digit string; with clues=True every non-'0' position is a clue"""
        vals = np.array([int(ch) for ch in text], dtype=np.int64)
        return cls(vals, vals != BLANK if clues else None)

    def to_string(self) -> str:
        return "".join(str(int(v)) for v in self.values)

    @classmethod
    def from_node_set(cls, n: int, nodes: Iterable[int]) -> "Assignment":
        vals = np.full(n, NODE_OUT, dtype=np.int64)
        vals[list(nodes)] = NODE_IN
        return cls(vals)

    def node_set(self) -> List[int]:
        """Positions holding NODE_IN"""
        return [int(i) for i in np.flatnonzero(self.values == NODE_IN)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.clue_mask, other.clue_mask)

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.clue_mask.tobytes()))

    def __repr__(self) -> str:
        return f"Assignment({self.to_string()!r}, clues={int(self.clue_mask.sum())})"


@dataclass(frozen=True)
class ConsistencyScore:
    """Con(., KB): integer points and whether no constraint is violated"""
    points: int
    fully_consistent: bool


class KnowledgeBase(LoggerMixin, ABC):
    """
    Consistency measurement and abduction over partial assignments

    Implementations are pure: every call depends only on its arguments and
    the KB's immutable configuration.
    """

    def __init__(self, n_symbols: int, mode: ConsistencyModeEnum = ConsistencyModeEnum.GRADED):
        self.n_symbols = n_symbols
        self.mode = ConsistencyModeEnum(mode)

    @property
    @abstractmethod
    def n_positions(self) -> int:
        """Length of assignments this KB reasons about"""

    @abstractmethod
    def measure(self, a: Assignment) -> ConsistencyScore:
        """Graded consistency score"""

    @abstractmethod
    def abduce(self, a: Assignment) -> Optional[Assignment]:
        """Complete a partial assignment consistently, or None when UNSAT"""

    def consistency(self, a: Assignment) -> ConsistencyScore:
        """Con(a, KB) in the configured measurement mode"""
        self.check(a)
        score = self.measure(a)
        if self.mode == ConsistencyModeEnum.BINARY:
            return ConsistencyScore(int(score.fully_consistent), score.fully_consistent)
        return score

    def is_solution(self, a: Assignment) -> bool:
        """Complete and without violations"""
        return a.is_complete() and self.measure(a).fully_consistent

    def check(self, a: Assignment) -> None:
        if a.n != self.n_positions:
            raise KnowledgeError(f"assignment has {a.n} positions, KB expects {self.n_positions}")
        if a.n and int(a.values.max()) > self.n_symbols:
            raise KnowledgeError(f"symbol {int(a.values.max())} outside 1..{self.n_symbols}")
