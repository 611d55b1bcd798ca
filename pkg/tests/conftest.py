"""
Pytest configuration and fixtures for reflx tests
"""

import pytest
from pathlib import Path
from src.config.settings import reload_settings
from src.config.train_config import TaskEnum
from src.data.models import Graph, SudokuRecord
from src.knowledge.base import Assignment
from src.models.refl_model import ReflModel

# Test data
SOLVED_4X4 = "1234341221434321"

SOLVED_9X9 = (
    "123456789"
    "456789123"
    "789123456"
    "234567891"
    "567891234"
    "891234567"
    "345678912"
    "678912345"
    "912345678"
)

# Uniquely solvable 4x4 puzzles (solution SOLVED_4X4)
PUZZLES_4X4 = [
    "1030001220034001",
    "0204300201030020",
    "1230001221004020",
]

TRIANGLE_EDGES = [(0, 1), (0, 2), (1, 2)]
# 0-1-2 triangle with a pendant 3 on node 2 and an isolated node 4
SMALL_GRAPH_EDGES = [(0, 1), (0, 2), (1, 2), (2, 3)]


def swap_cells(board: str, i: int, j: int) -> str:
    cells = list(board)
    cells[i], cells[j] = cells[j], cells[i]
    return "".join(cells)


@pytest.fixture
def solved_4x4() -> Assignment:
    """Complete valid 4x4 board without clues"""
    return Assignment.from_string(SOLVED_4X4, clues=False)


@pytest.fixture
def solved_9x9() -> Assignment:
    """Complete valid 9x9 board without clues"""
    return Assignment.from_string(SOLVED_9X9, clues=False)


@pytest.fixture
def records_4x4():
    return [SudokuRecord(puzzle=p, solution=SOLVED_4X4) for p in PUZZLES_4X4]


@pytest.fixture
def triangle() -> Graph:
    return Graph(node_count=3, edges=TRIANGLE_EDGES, name="triangle")


@pytest.fixture
def small_graph() -> Graph:
    return Graph(node_count=5, edges=SMALL_GRAPH_EDGES, name="small")


@pytest.fixture
def tiny_sudoku_model() -> ReflModel:
    """Seeded, untrained 4x4 model small enough for gradient checks"""
    return ReflModel.for_sudoku(4, d=8, T=2, seed=0)


@pytest.fixture
def tiny_graph_model() -> ReflModel:
    return ReflModel.for_graphs(TaskEnum.CLIQUE, d=8, T=2, seed=0, degree_cap=6)


@pytest.fixture
def test_data_dir() -> Path:
    """Path to test data directory"""
    return Path(__file__).parent / "test_data"


@pytest.fixture(autouse=True)
def reset_settings(monkeypatch):
    """Every test starts from default settings without REFLX_ environment overrides"""
    for key in ("REFLX_SEED", "REFLX_WORKERS", "REFLX_LOG_LEVEL", "REFLX_LOG_FORMAT", "REFLX_DATA_DIR"):
        monkeypatch.delenv(key, raising=False)
    reload_settings()
    yield
    reload_settings()
