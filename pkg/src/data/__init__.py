"""
Datasets, generators and reference oracles for reflx
"""

from .models import CorpusManifest, DatasetError, Graph, SudokuRecord, rule_violations
from .loader import CorpusLoader, load_graphs, load_sudoku_csv, manifest_path
from .oracles import (
    OracleSizeError, exhaustive_max_clique, oracle_max_clique,
    oracle_max_independent_set, oracle_solve_sudoku_exhaustive,
)
from .generators import GenerationError, generate_graph_corpus, generate_random_graph, generate_sudoku

__all__ = [
    "CorpusManifest", "DatasetError", "Graph", "SudokuRecord", "rule_violations",
    "CorpusLoader", "load_graphs", "load_sudoku_csv", "manifest_path",
    "OracleSizeError", "exhaustive_max_clique", "oracle_max_clique",
    "oracle_max_independent_set", "oracle_solve_sudoku_exhaustive",
    "GenerationError", "generate_graph_corpus", "generate_random_graph", "generate_sudoku",
]
