"""
Seeded corpus generators for Sudoku puzzles and random graphs
"""

import math
from typing import List, Sequence
import networkx as nx
import numpy as np
from src.config.constants import GENERATION_RETRY_BUDGET, SUDOKU_SIDES
from src.data.models import Graph, SudokuRecord
from src.data.oracles import oracle_solve_sudoku_exhaustive
from src.utils.logger import get_logger, log_performance
from src.utils.validators import validate_probability

logger = get_logger("generators")


class GenerationError(Exception):
    """No instance with the requested parameters could be produced"""
    pass


def random_solution(side: int, rng: np.random.Generator) -> np.ndarray:
    """
    A uniformly shuffled valid grid

    Starts from the canonical pattern and applies digit relabeling, row swaps
    within bands, band swaps, column swaps within stacks, stack swaps and an
    optional transpose.
    """
    box = math.isqrt(side)
    r = np.arange(side)
    base = (box * (r[:, None] % box) + r[:, None] // box + r[None, :]) % side
    digits = rng.permutation(side) + 1
    grid = digits[base]
    bands = rng.permutation(box)
    rows = np.concatenate([b * box + rng.permutation(box) for b in bands])
    stacks = rng.permutation(box)
    cols = np.concatenate([s * box + rng.permutation(box) for s in stacks])
    grid = grid[rows][:, cols]
    if rng.random() < 0.5:
        grid = grid.T
    return grid.reshape(-1)


def _is_unique(puzzle: str, side: int) -> bool:
    if side == 4:
        return len(oracle_solve_sudoku_exhaustive(puzzle, side, limit=2)) == 1
    # 9x9 boards are too large to enumerate; count SAT models up to 2 instead
    from src.knowledge.base import Assignment
    from src.knowledge.sudoku import count_completions
    return count_completions(Assignment.from_string(puzzle), "sat", side, limit=2) == 1


def _dig(solution: np.ndarray, side: int, clue_count: int, rng: np.random.Generator):
    cells = list(solution.astype(str))
    blanks_needed = side * side - clue_count
    removed = 0
    for cell in rng.permutation(side * side):
        if removed == blanks_needed:
            break
        kept = cells[cell]
        cells[cell] = "0"
        if _is_unique("".join(cells), side):
            removed += 1
        else:
            cells[cell] = kept
    return "".join(cells) if removed == blanks_needed else None


@log_performance
def generate_sudoku(side: int, clue_count: int, count: int, seed: int) -> List[SudokuRecord]:
    """
    Uniquely solvable puzzles with exactly clue_count clues

    Args:
        side: 4 or 9
        clue_count: Clues per puzzle, below side*side
        count: Number of records
        seed: Generator seed; equal seeds give identical corpora

    Raises:
        GenerationError: when a puzzle cannot be dug down to clue_count within
            the retry budget
    """
    if side not in SUDOKU_SIDES:
        raise GenerationError(f"unsupported side {side}")
    if not 0 <= clue_count < side * side:
        raise GenerationError(f"clue_count must be in 0..{side * side - 1}, got {clue_count}")
    rng = np.random.default_rng(seed)
    records: List[SudokuRecord] = []
    for index in range(count):
        for _ in range(GENERATION_RETRY_BUDGET):
            solution = random_solution(side, rng)
            puzzle = _dig(solution, side, clue_count, rng)
            if puzzle is not None:
                records.append(SudokuRecord(puzzle=puzzle, solution="".join(solution.astype(str))))
                break
        else:
            raise GenerationError(
                f"no uniquely solvable {side}x{side} puzzle with {clue_count} clues "
                f"after {GENERATION_RETRY_BUDGET} attempts (record {index})"
            )
    logger.info("sudoku_generated", side=side, clue_count=clue_count, count=count, seed=seed)
    return records


def generate_random_graph(n: int, p: float, seed: int, name: str = "") -> Graph:
    """Erdos-Renyi G(n, p): each pair is an edge independently with probability p"""
    if n < 1:
        raise GenerationError(f"n must be at least 1, got {n}")
    if not validate_probability(p):
        raise GenerationError(f"p must be in [0, 1], got {p}")
    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed), name=name)


@log_performance
def generate_graph_corpus(count: int, sizes: Sequence[int], ps: Sequence[float], seed: int) -> List[Graph]:
    """count graphs; graph i draws n from sizes and p from ps, with its own derived seed"""
    rng = np.random.default_rng(seed)
    graphs = []
    for i in range(count):
        n = int(sizes[rng.integers(len(sizes))])
        p = float(ps[rng.integers(len(ps))])
        graphs.append(generate_random_graph(n, p, seed=int(rng.integers(2**31 - 1)), name=f"er_n{n}_p{p:g}"))
    return graphs
