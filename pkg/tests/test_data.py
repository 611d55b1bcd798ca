"""
Tests for corpus loading, generation and the reference oracles
"""

import pytest
from pydantic import ValidationError
from src.data.generators import GenerationError, generate_graph_corpus, generate_random_graph, generate_sudoku
from src.data.loader import CorpusLoader, manifest_path
from src.data.models import DatasetError, Graph, SudokuRecord, rule_violations
from src.data.oracles import (
    OracleSizeError, exhaustive_max_clique, oracle_max_clique, oracle_max_independent_set,
    oracle_solve_sudoku_exhaustive,
)
from src.utils.validators import infer_side, validate_digit_string, validate_probability
from tests.conftest import PUZZLES_4X4, SOLVED_4X4


class TestSudokuCsv:

    @pytest.mark.unit
    def test_load(self, test_data_dir):
        records = CorpusLoader().load_sudoku_csv(test_data_dir / "puzzles_4x4.csv")
        assert [r.puzzle for r in records] == PUZZLES_4X4
        assert all(r.solution == SOLVED_4X4 and r.side == 4 for r in records)

    @pytest.mark.unit
    def test_invalid_rows_listed_by_line(self, test_data_dir):
        with pytest.raises(DatasetError) as exc:
            CorpusLoader().load_sudoku_csv(test_data_dir / "bad_puzzles.csv")
        message = str(exc.value)
        assert "2 invalid rows" in message
        assert "line 3:" in message and "line 4:" in message
        assert "line 2:" not in message

    @pytest.mark.unit
    def test_write_then_load(self, tmp_path, records_4x4):
        loader = CorpusLoader()
        path = loader.write_sudoku_csv(records_4x4, tmp_path / "out" / "p.csv")
        assert path.read_text().splitlines()[0] == "quizzes,solutions"
        assert loader.load_sudoku_csv(path) == records_4x4

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError):
            CorpusLoader().load_sudoku_csv(tmp_path / "nope.csv")

    @pytest.mark.unit
    def test_wrong_header(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("puzzle,solution\n1030001220034001,1234341221434321\n")
        with pytest.raises(DatasetError, match="header"):
            CorpusLoader().load_sudoku_csv(path)

    @pytest.mark.unit
    def test_relative_paths_resolve_under_data_dir(self, test_data_dir):
        loader = CorpusLoader(data_dir=test_data_dir)
        assert len(loader.load_sudoku_csv("puzzles_4x4.csv")) == 3


class TestSudokuRecord:

    @pytest.mark.unit
    def test_clue_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="disagrees"):
            SudokuRecord(puzzle="2" + "0" * 15, solution=SOLVED_4X4)

    @pytest.mark.unit
    def test_rule_violations_names_groups(self):
        board = "1" * 2 + "0" * 14
        assert sorted(rule_violations(board, 4)) == ["box 0", "row 0"]
        assert rule_violations(SOLVED_4X4, 4) == []

    @pytest.mark.unit
    def test_validators(self):
        assert infer_side(81) == 9 and infer_side(16) == 4
        assert infer_side(36) is None and infer_side(15) is None
        assert validate_digit_string("0" * 16, 4, allow_blank=True) is None
        assert "outside" in validate_digit_string("5" + "1" * 15, 4, allow_blank=True)
        assert validate_digit_string("0" * 16, 4, allow_blank=False) is not None
        assert validate_probability(0.5) and not validate_probability(1.5)


class TestGraphs:

    @pytest.mark.unit
    def test_edge_list_file(self, test_data_dir):
        g = CorpusLoader().load_edge_list(test_data_dir / "graphs" / "small.edges")
        assert g.node_count == 5
        assert g.edges == [(0, 1), (0, 2), (1, 2), (2, 3)]
        assert g.name == "small"

    @pytest.mark.unit
    def test_directory_loads_in_name_order(self, test_data_dir):
        graphs = CorpusLoader().load_graphs(test_data_dir / "graphs")
        assert [g.name for g in graphs] == ["small", "triangle"]

    @pytest.mark.unit
    def test_edge_count_mismatch(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("3 2\n0 1\n")
        with pytest.raises(DatasetError, match="declares 2"):
            CorpusLoader().load_edge_list(path)

    @pytest.mark.unit
    def test_self_loop_in_file(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("3 1\n1 1\n")
        with pytest.raises(DatasetError, match="self-loop"):
            CorpusLoader().load_edge_list(path)

    @pytest.mark.unit
    @pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 3)]])
    def test_graph_validation(self, edges):
        with pytest.raises(ValidationError):
            Graph(node_count=3, edges=edges)

    @pytest.mark.unit
    def test_edges_normalized(self):
        g = Graph(node_count=3, edges=[(2, 0), (1, 0)])
        assert g.edges == [(0, 1), (0, 2)]
        assert g.degrees() == [2, 1, 1]


class TestGenerators:

    @pytest.mark.unit
    def test_sudoku_puzzles_are_unique(self):
        records = generate_sudoku(4, clue_count=8, count=5, seed=1)
        assert len(records) == 5
        for record in records:
            assert record.clue_count == 8
            assert oracle_solve_sudoku_exhaustive(record) == [record.solution]

    @pytest.mark.unit
    def test_sudoku_is_seeded(self):
        assert generate_sudoku(4, 8, 3, seed=7) == generate_sudoku(4, 8, 3, seed=7)

    @pytest.mark.unit
    def test_zero_clue_4x4_cannot_be_unique(self):
        with pytest.raises(GenerationError):
            generate_sudoku(4, clue_count=0, count=1, seed=0)

    @pytest.mark.unit
    @pytest.mark.parametrize("side,clues", [(5, 8), (4, 16)])
    def test_bad_generation_parameters(self, side, clues):
        with pytest.raises(GenerationError):
            generate_sudoku(side, clues, 1, seed=0)

    @pytest.mark.unit
    def test_graph_extremes(self):
        assert generate_random_graph(6, 0.0, seed=0).edge_count == 0
        assert generate_random_graph(6, 1.0, seed=0).edge_count == 15

    @pytest.mark.unit
    def test_graph_corpus_is_seeded(self):
        a = generate_graph_corpus(4, sizes=[8, 10], ps=[0.3, 0.5], seed=2)
        b = generate_graph_corpus(4, sizes=[8, 10], ps=[0.3, 0.5], seed=2)
        assert a == b
        assert all(g.node_count in (8, 10) for g in a)

    @pytest.mark.unit
    def test_bad_probability(self):
        with pytest.raises(GenerationError):
            generate_random_graph(5, 1.5, seed=0)


class TestOracles:

    @pytest.mark.unit
    def test_triangle_clique(self, triangle):
        assert oracle_max_clique(triangle) == [0, 1, 2]

    @pytest.mark.unit
    def test_path_independent_set(self):
        path = Graph(node_count=3, edges=[(0, 1), (1, 2)])
        assert len(oracle_max_independent_set(path)) == 2

    @pytest.mark.unit
    def test_bron_kerbosch_agrees_with_exhaustive_scan(self):
        for seed in range(10):
            g = generate_random_graph(14, 0.5, seed=seed)
            assert len(oracle_max_clique(g)) == len(exhaustive_max_clique(g))
            assert len(oracle_max_independent_set(g)) == len(exhaustive_max_clique(g, independent=True))

    @pytest.mark.unit
    def test_size_guards(self):
        with pytest.raises(OracleSizeError):
            exhaustive_max_clique(Graph(node_count=17))
        with pytest.raises(OracleSizeError):
            oracle_max_clique(Graph(node_count=41))

    @pytest.mark.unit
    def test_empty_4x4_board_has_288_solutions(self):
        assert len(oracle_solve_sudoku_exhaustive("0" * 16)) == 288

    @pytest.mark.unit
    def test_contradictory_clues_have_none(self):
        assert oracle_solve_sudoku_exhaustive("11" + "0" * 14) == []


class TestManifests:

    @pytest.mark.unit
    def test_write_and_read(self, tmp_path, records_4x4):
        loader = CorpusLoader()
        corpus = loader.write_sudoku_csv(records_4x4, tmp_path / "p.csv")
        written = loader.write_manifest(corpus, "sudoku", seed=5, parameters={"side": 4}, record_count=3)
        assert written == manifest_path(corpus)
        manifest = loader.read_manifest(corpus)
        assert (manifest.kind, manifest.seed, manifest.record_count) == ("sudoku", 5, 3)
        assert len(manifest.sha256) == 64

    @pytest.mark.unit
    def test_checksum_covers_graph_directories(self, tmp_path, triangle, small_graph):
        loader = CorpusLoader()
        directory = loader.write_graphs([triangle, small_graph], tmp_path / "graphs")
        first = loader.write_manifest(directory, "graphs", 0, {}, 2)
        sha = loader.read_manifest(directory).sha256
        loader.write_graphs([triangle], tmp_path / "graphs_b")
        loader.write_manifest(tmp_path / "graphs_b", "graphs", 0, {}, 1)
        assert first.exists()
        assert loader.read_manifest(tmp_path / "graphs_b").sha256 != sha

    @pytest.mark.unit
    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DatasetError):
            CorpusLoader().read_manifest(tmp_path / "nothing.csv")
