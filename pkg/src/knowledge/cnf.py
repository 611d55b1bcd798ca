"""
Propositional encoding of Sudoku and DIMACS CNF input/output
"""

import re
from dataclasses import dataclass, field
from typing import Iterable, List, Optional
import numpy as np
from src.config.constants import BLANK
from src.knowledge.base import Assignment, KnowledgeError
from src.knowledge.sudoku_rules import peer_pairs

Clause = List[int]


@dataclass
class CnfFormula:
    num_vars: int
    clauses: List[Clause] = field(default_factory=list)

    def add_clause(self, clause: Iterable[int]) -> None:
        cl = [int(lit) for lit in clause]
        if any(lit == 0 or abs(lit) > self.num_vars for lit in cl):
            raise KnowledgeError(f"clause {cl} has a literal outside 1..{self.num_vars}")
        self.clauses.append(cl)

    def to_dimacs(self, comment: Optional[str] = None) -> str:
        lines = [f"c {comment}"] if comment else []
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        for cl in self.clauses:
            lines.append(" ".join(str(lit) for lit in cl) + " 0")
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text; clauses may span lines and end with 0"""
    header = None
    clauses: List[Clause] = []
    pending: List[int] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if header is None:
            header = re.match(r"p\s+cnf\s+(\d+)\s+(\d+)", line)
            if header is None:
                raise KnowledgeError(f"line {number}: expected 'p cnf' header, got {line!r}")
            continue
        for token in line.split():
            lit = int(token)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if header is None:
        raise KnowledgeError("missing 'p cnf' header")
    if pending:
        clauses.append(pending)
    num_vars, num_clauses = (int(x) for x in header.groups())
    if len(clauses) != num_clauses:
        raise KnowledgeError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    formula = CnfFormula(num_vars)
    for cl in clauses:
        formula.add_clause(cl)
    return formula


def cell_var(cell: int, digit: int, side: int) -> int:
    """Variable id of 'cell holds digit' (digit 1-based)"""
    return cell * side + digit


def encode_cnf(a: Assignment, side: int) -> CnfFormula:
    """
    Encode the Sudoku rules plus a's fixed entries

    Each cell holds at least one and at most one digit, no digit repeats
    between two cells sharing a row, column or subgrid, and every non-BLANK
    entry becomes a unit clause.
    """
    n = side * side
    if a.n != n:
        raise KnowledgeError(f"assignment has {a.n} cells, side {side} needs {n}")
    formula = CnfFormula(n * side)
    digits = range(1, side + 1)
    for cell in range(n):
        formula.add_clause(cell_var(cell, d, side) for d in digits)
        for d1 in digits:
            for d2 in range(d1 + 1, side + 1):
                formula.add_clause([-cell_var(cell, d1, side), -cell_var(cell, d2, side)])
    for u, v in peer_pairs(side):
        for d in digits:
            formula.add_clause([-cell_var(u, d, side), -cell_var(v, d, side)])
    for cell in np.flatnonzero(a.values != BLANK):
        formula.add_clause([cell_var(int(cell), int(a.values[cell]), side)])
    return formula


def decode_model(model: List[int], side: int) -> np.ndarray:
    """Turn a satisfying literal list back into cell values"""
    n = side * side
    values = np.zeros(n, dtype=np.int64)
    for lit in model:
        if lit > 0:
            cell, digit = divmod(lit - 1, side)
            values[cell] = digit + 1
    return values
