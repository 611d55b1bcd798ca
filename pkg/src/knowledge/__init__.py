"""
Knowledge bases: consistency measurement and abduction
"""

from .base import Assignment, ConsistencyScore, KnowledgeBase, KnowledgeError
from .cnf import CnfFormula, cell_var, encode_cnf, parse_dimacs, decode_model
from .sat_solver import CdclSolver
from .csp_solver import SudokuCspSolver
from .sudoku import SudokuKB, con_sudoku, abduce_sudoku, count_completions
from .sudoku_rules import sudoku_units, sudoku_peers
from .graph_kb import GraphKB, con_clique, con_mis, abduce_clique, abduce_mis, max_clique_within

__all__ = [
    "Assignment", "ConsistencyScore", "KnowledgeBase", "KnowledgeError",
    "CnfFormula", "cell_var", "encode_cnf", "parse_dimacs", "decode_model",
    "CdclSolver", "SudokuCspSolver",
    "SudokuKB", "con_sudoku", "abduce_sudoku", "count_completions",
    "sudoku_units", "sudoku_peers",
    "GraphKB", "con_clique", "con_mis", "abduce_clique", "abduce_mis", "max_clique_within",
]
