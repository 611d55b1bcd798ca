"""
Sudoku units and peer structure shared by the scorer, the encoders and the solvers
"""

from functools import lru_cache
from typing import List, Tuple
import math
import numpy as np
from src.config.constants import SUDOKU_SIDES
from src.knowledge.base import KnowledgeError


@lru_cache(maxsize=None)
def sudoku_units(side: int) -> np.ndarray:
    """(3*side, side) cell indices: rows, then columns, then subgrids"""
    if side not in SUDOKU_SIDES:
        raise KnowledgeError(f"unsupported Sudoku side {side}")
    box = math.isqrt(side)
    grid = np.arange(side * side).reshape(side, side)
    rows = [grid[r, :] for r in range(side)]
    cols = [grid[:, c] for c in range(side)]
    boxes = [
        grid[br:br + box, bc:bc + box].reshape(-1)
        for br in range(0, side, box)
        for bc in range(0, side, box)
    ]
    units = np.stack(rows + cols + boxes)
    units.flags.writeable = False
    return units


@lru_cache(maxsize=None)
def sudoku_peers(side: int) -> Tuple[Tuple[int, ...], ...]:
    """Sorted peers of every cell"""
    peers: List[set] = [set() for _ in range(side * side)]
    for unit in sudoku_units(side):
        for u in unit:
            peers[int(u)].update(int(v) for v in unit if v != u)
    return tuple(tuple(sorted(p)) for p in peers)


@lru_cache(maxsize=None)
def peer_pairs(side: int) -> Tuple[Tuple[int, int], ...]:
    """Each unordered pair of peers once, u < v"""
    return tuple((u, v) for u, ps in enumerate(sudoku_peers(side)) for v in ps if u < v)
