"""
Finite-domain Sudoku solver: bitmask domains, peer elimination to a fixpoint,
minimum-remaining-values backtracking
"""

from typing import List, Optional
import numpy as np
from src.config.constants import BLANK
from src.knowledge.sudoku_rules import sudoku_peers
from src.utils.logger import LoggerMixin


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class SudokuCspSolver(LoggerMixin):
    """All-different propagation with naked singles only; no hidden-single reasoning"""

    def __init__(self, side: int):
        self.side = side
        self.peers = sudoku_peers(side)
        self.full = (1 << side) - 1
        self.nodes_expanded = 0

    def _assign(self, domains: List[int], cell: int, digit: int) -> bool:
        bit = 1 << (digit - 1)
        if not domains[cell] & bit:
            return False
        domains[cell] = bit
        stack = [cell]
        while stack:
            c = stack.pop()
            b = domains[c]
            for p in self.peers[c]:
                if domains[p] & b:
                    domains[p] &= ~b
                    if domains[p] == 0:
                        return False
                    if _popcount(domains[p]) == 1:
                        stack.append(p)
        return True

    def _initial_domains(self, values: np.ndarray) -> Optional[List[int]]:
        domains = [self.full] * (self.side * self.side)
        for cell in np.flatnonzero(values != BLANK):
            if not self._assign(domains, int(cell), int(values[cell])):
                return None
        return domains

    def _search(self, domains: List[int], solutions: List[List[int]], limit: int) -> None:
        self.nodes_expanded += 1
        open_cells = [(_popcount(d), i) for i, d in enumerate(domains) if _popcount(d) > 1]
        if not open_cells:
            solutions.append(domains)
            return
        _, cell = min(open_cells)
        mask = domains[cell]
        for digit in range(1, self.side + 1):
            if mask & (1 << (digit - 1)):
                child = list(domains)
                if self._assign(child, cell, digit):
                    self._search(child, solutions, limit)
                    if len(solutions) >= limit:
                        return

    def _enumerate(self, values, limit: int) -> List[np.ndarray]:
        values = np.asarray(values, dtype=np.int64)
        domains = self._initial_domains(values)
        if domains is None:
            return []
        found: List[List[int]] = []
        self._search(domains, found, limit)
        return [
            np.array([d.bit_length() for d in sol], dtype=np.int64)
            for sol in found
        ]

    def solve(self, values) -> Optional[np.ndarray]:
        """First completion of values (BLANK = free) or None"""
        solutions = self._enumerate(values, 1)
        return solutions[0] if solutions else None

    def count_solutions(self, values, limit: int) -> int:
        return len(self._enumerate(values, limit))
