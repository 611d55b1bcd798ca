"""
Brute-force reference solvers

These share no constraint code with src.knowledge, so agreement between an
oracle and a knowledge-base solver is an independent check.
"""

from itertools import combinations
from typing import List, Optional, Union
import networkx as nx
from src.config.constants import EXHAUSTIVE_MAX_NODES, ORACLE_MAX_NODES
from src.data.models import Graph, SudokuRecord, rule_violations


class OracleSizeError(Exception):
    """Instance too large for an exact oracle"""
    pass


def _guard(g: Graph, limit: int, oracle: str) -> None:
    if g.node_count > limit:
        raise OracleSizeError(f"{oracle} handles at most {limit} nodes, graph has {g.node_count}")


def _largest_clique(nxg: nx.Graph) -> List[int]:
    # find_cliques enumerates maximal cliques by Bron-Kerbosch with pivoting
    best: List[int] = []
    for clique in nx.find_cliques(nxg):
        if len(clique) > len(best):
            best = clique
    return sorted(best)


def oracle_max_clique(g: Graph) -> List[int]:
    """Maximum clique by Bron-Kerbosch enumeration (n <= 40)"""
    _guard(g, ORACLE_MAX_NODES, "Bron-Kerbosch oracle")
    return _largest_clique(g.to_networkx())


def oracle_max_independent_set(g: Graph) -> List[int]:
    """Maximum independent set as the maximum clique of the complement (n <= 40)"""
    _guard(g, ORACLE_MAX_NODES, "Bron-Kerbosch oracle")
    return _largest_clique(nx.complement(g.to_networkx()))


def exhaustive_max_clique(g: Graph, independent: bool = False) -> List[int]:
    """Largest clique (or independent set) by scanning subsets from the largest size down (n <= 16)"""
    _guard(g, EXHAUSTIVE_MAX_NODES, "exhaustive oracle")
    edges = set(g.edges)
    for size in range(g.node_count, 0, -1):
        for subset in combinations(range(g.node_count), size):
            if all(((u, v) in edges) != independent for u, v in combinations(subset, 2)):
                return list(subset)
    return []


def oracle_solve_sudoku_exhaustive(
    record: Union[SudokuRecord, str], side: int = 4, limit: Optional[int] = None
) -> List[str]:
    """
    Enumerate every completion of a 4x4 puzzle

    Cells are filled in index order with each digit in turn; a partial board is
    extended only while rule_violations finds nothing.

    Args:
        record: Record or puzzle string ('0' = blank)
        side: Must be 4
        limit: Stop after this many completions

    Returns:
        Completed boards as digit strings, in lexicographic order
    """
    if side != 4:
        raise OracleSizeError("exhaustive Sudoku enumeration is limited to 4x4 boards")
    puzzle = record.puzzle if isinstance(record, SudokuRecord) else record
    if len(puzzle) != side * side:
        raise ValueError(f"expected {side * side} cells, got {len(puzzle)}")
    if rule_violations(puzzle, side):
        return []
    board = list(puzzle)
    found: List[str] = []

    def fill(cell: int) -> bool:
        if cell == len(board):
            found.append("".join(board))
            return limit is not None and len(found) >= limit
        if board[cell] != "0":
            return fill(cell + 1)
        for digit in "1234":
            board[cell] = digit
            if not rule_violations("".join(board), side) and fill(cell + 1):
                board[cell] = "0"
                return True
        board[cell] = "0"
        return False

    fill(0)
    return found
