"""
Tests for clique and independent-set scoring and abduction
"""

import pytest
from src.config.constants import BLANK, NODE_IN, NODE_OUT
from src.config.train_config import ConsistencyModeEnum, TaskEnum
from src.data.generators import generate_random_graph
from src.data.models import Graph
from src.data.oracles import exhaustive_max_clique, oracle_max_clique, oracle_max_independent_set
from src.knowledge import (
    Assignment, GraphKB, KnowledgeError, abduce_clique, abduce_mis, con_clique, con_mis, max_clique_within,
)


class TestScoring:

    @pytest.mark.unit
    def test_triangle_clique_scores_33(self, triangle):
        score = con_clique(triangle, [0, 1, 2])
        assert score.points == 33
        assert score.fully_consistent

    @pytest.mark.unit
    def test_empty_set(self, triangle):
        score = con_clique(triangle, [])
        assert score.points == 0
        assert score.fully_consistent

    @pytest.mark.unit
    def test_non_adjacent_pair(self, small_graph):
        score = con_clique(small_graph, [0, 3])
        assert not score.fully_consistent
        assert score.points == 0

    @pytest.mark.unit
    def test_two_isolated_nodes_mis_scores_21(self):
        g = Graph(node_count=2)
        assert con_mis(g, [0, 1]).points == 21

    @pytest.mark.unit
    def test_adjacent_pair_not_independent(self, triangle):
        assert not con_mis(triangle, [0, 1]).fully_consistent

    @pytest.mark.unit
    def test_node_out_of_range(self, triangle):
        with pytest.raises(KnowledgeError):
            con_clique(triangle, [0, 7])


class TestAbduction:

    @pytest.mark.unit
    def test_extends_adjacent_pair(self):
        # a=0, b=1, c=2 adjacent to both, d=3 adjacent to neither
        g = Graph(node_count=4, edges=[(0, 1), (0, 2), (1, 2)])
        assert abduce_clique(g, [0, 1], []) == [0, 1, 2]

    @pytest.mark.unit
    def test_non_adjacent_fixed_pair_is_unsat(self, small_graph):
        assert abduce_clique(small_graph, [0, 3], []) is None

    @pytest.mark.unit
    def test_fixed_out_respected(self, small_graph):
        assert abduce_clique(small_graph, [], [2]) == [0, 1]

    @pytest.mark.unit
    def test_overlap_is_an_error(self, small_graph):
        with pytest.raises(KnowledgeError, match="both fixed"):
            abduce_clique(small_graph, [1], [1])

    @pytest.mark.unit
    def test_mis_of_path(self):
        path = Graph(node_count=3, edges=[(0, 1), (1, 2)])
        assert abduce_mis(path, [], []) == [0, 2]
        assert oracle_max_independent_set(path) == [0, 2]

    @pytest.mark.unit
    def test_empty_edge_graph(self):
        g = Graph(node_count=5)
        assert len(abduce_clique(g, [], [])) == 1
        assert abduce_mis(g, [], []) == [0, 1, 2, 3, 4]

    @pytest.mark.unit
    def test_matches_oracles_on_random_graphs(self):
        for seed in range(40):
            g = generate_random_graph(12 + seed % 3, 0.3 + 0.2 * (seed % 2), seed)
            clique = abduce_clique(g, [], [])
            mis = abduce_mis(g, [], [])
            assert con_clique(g, clique).fully_consistent
            assert con_mis(g, mis).fully_consistent
            assert len(clique) == len(oracle_max_clique(g)) == len(exhaustive_max_clique(g))
            assert len(mis) == len(oracle_max_independent_set(g)) == len(exhaustive_max_clique(g, independent=True))

    @pytest.mark.unit
    def test_abduction_is_sound_with_fixed_nodes(self):
        g = generate_random_graph(14, 0.5, seed=3)
        for v in range(g.node_count):
            result = abduce_clique(g, [v], [(v + 1) % g.node_count])
            assert v in result
            assert (v + 1) % g.node_count not in result
            assert con_clique(g, result).fully_consistent

    @pytest.mark.unit
    def test_max_clique_within_candidates(self, small_graph):
        assert max_clique_within(small_graph.adjacency, [2, 3, 4]) == [2, 3]
        assert max_clique_within(small_graph.adjacency, []) == []


class TestGraphKB:

    @pytest.mark.unit
    def test_measure_reads_selected_nodes(self, triangle):
        kb = GraphKB(triangle, TaskEnum.CLIQUE)
        a = Assignment([NODE_IN, NODE_IN, NODE_OUT])
        assert kb.measure(a).points == 1 + 20

    @pytest.mark.unit
    def test_abduce_fills_blanks(self, small_graph):
        kb = GraphKB(small_graph, TaskEnum.CLIQUE)
        a = Assignment([BLANK, BLANK, BLANK, NODE_IN, BLANK])
        result = kb.abduce(a)
        assert result.node_set() == [2, 3]
        assert kb.is_solution(result)

    @pytest.mark.unit
    def test_abduce_unsat(self, small_graph):
        kb = GraphKB(small_graph, TaskEnum.MIS)
        assert kb.abduce(Assignment([NODE_IN, NODE_IN, BLANK, BLANK, BLANK])) is None

    @pytest.mark.unit
    def test_optimum_size(self, small_graph):
        assert GraphKB(small_graph, TaskEnum.CLIQUE).optimum_size() == 3
        assert GraphKB(small_graph, TaskEnum.MIS).optimum_size() == 3

    @pytest.mark.unit
    def test_binary_mode(self, triangle):
        kb = GraphKB(triangle, TaskEnum.CLIQUE, mode=ConsistencyModeEnum.BINARY)
        assert kb.consistency(Assignment.from_node_set(3, [0, 1, 2])).points == 1

    @pytest.mark.unit
    def test_rejects_sudoku_task(self, triangle):
        with pytest.raises(KnowledgeError):
            GraphKB(triangle, TaskEnum.SUDOKU)
