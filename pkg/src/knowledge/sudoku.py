"""
Sudoku knowledge base: unit-based consistency scoring and abduction
through the SAT or CSP backend
"""

from typing import Optional
import numpy as np
from src.config.constants import BLANK, CONSISTENCY_BONUS, UNIT_POINT
from src.config.train_config import BackendEnum, ConsistencyModeEnum
from src.knowledge.base import Assignment, ConsistencyScore, KnowledgeBase, KnowledgeError
from src.knowledge.cnf import decode_model, encode_cnf
from src.knowledge.csp_solver import SudokuCspSolver
from src.knowledge.sat_solver import CdclSolver
from src.knowledge.sudoku_rules import sudoku_units


def _unit_violations(values: np.ndarray, side: int) -> np.ndarray:
    """Boolean per unit: some non-BLANK symbol repeats among its cells"""
    if values.size != side * side:
        raise KnowledgeError(f"assignment has {values.size} cells, side {side} needs {side * side}")
    cells = np.sort(values[sudoku_units(side)], axis=1)
    repeated = (cells[:, 1:] == cells[:, :-1]) & (cells[:, 1:] != BLANK)
    return repeated.any(axis=1)


def con_sudoku(a: Assignment, side: int) -> ConsistencyScore:
    """
    Graded consistency of a (possibly partial) board

    One point per row, column and subgrid whose assigned cells hold no
    duplicate, plus the bonus when no unit has a duplicate.
    """
    violations = _unit_violations(a.values, side)
    ok = not violations.any()
    points = UNIT_POINT * int(np.count_nonzero(~violations))
    if ok:
        points += CONSISTENCY_BONUS
    return ConsistencyScore(points, ok)


def abduce_sudoku(a: Assignment, backend: BackendEnum, side: int) -> Optional[Assignment]:
    """
    Complete a partial board, keeping every non-BLANK entry

    Args:
        a: Partial assignment; non-BLANK entries are hard constraints
        backend: sat or csp
        side: 4 or 9

    Returns:
        The completed board, or None when the fixed entries admit no completion
    """
    if _unit_violations(a.values, side).any():
        return None
    if a.is_complete():
        return a
    if BackendEnum(backend) == BackendEnum.SAT:
        model = CdclSolver(encode_cnf(a, side)).solve()
        values = decode_model(model, side) if model is not None else None
    else:
        values = SudokuCspSolver(side).solve(a.values)
    return None if values is None else a.with_values(values)


def count_completions(a: Assignment, backend: BackendEnum, side: int, limit: int = 2) -> int:
    """Number of consistent completions of a, counted up to limit"""
    if _unit_violations(a.values, side).any():
        return 0
    if BackendEnum(backend) == BackendEnum.SAT:
        return CdclSolver(encode_cnf(a, side)).count_models(limit)
    return SudokuCspSolver(side).count_solutions(a.values, limit)


class SudokuKB(KnowledgeBase):
    """Sudoku rules for one board size and abduction backend"""

    def __init__(
        self,
        side: int,
        backend: BackendEnum = BackendEnum.SAT,
        mode: ConsistencyModeEnum = ConsistencyModeEnum.GRADED,
    ):
        super().__init__(n_symbols=side, mode=mode)
        sudoku_units(side)  # rejects unsupported sides
        self.side = side
        self.backend = BackendEnum(backend)

    @property
    def n_positions(self) -> int:
        return self.side * self.side

    def measure(self, a: Assignment) -> ConsistencyScore:
        return con_sudoku(a, self.side)

    def abduce(self, a: Assignment) -> Optional[Assignment]:
        self.check(a)
        result = abduce_sudoku(a, self.backend, self.side)
        if result is None:
            self.logger.debug("abduction_unsat", backend=self.backend.value, blanks=a.blank_count)
        return result

    def count_completions(self, a: Assignment, limit: int = 2) -> int:
        self.check(a)
        return count_completions(a, self.backend, self.side, limit)
