"""
Tests for constraint graphs and the reflection model
"""

import numpy as np
import pytest
import src.autodiff as ad
from src.autodiff import Tape, finite_diff_check
from src.config.train_config import TaskEnum, TrainConfig
from src.data.models import Graph
from src.knowledge.base import Assignment
from src.models import (
    ConstraintGraph, ModelError, ReflModel, blank_input, build_sudoku_graph, decode,
    graph_to_constraint_graph, joint_log_prob,
)
from tests.conftest import PUZZLES_4X4, SOLVED_4X4


class TestConstraintGraphs:

    @pytest.mark.unit
    def test_sudoku_9x9_graph(self):
        g = build_sudoku_graph(9)
        assert g.node_count == 81
        assert all(g.degree(v) == 20 for v in range(81))
        assert g.edge_count == 810

    @pytest.mark.unit
    def test_sudoku_4x4_graph(self):
        g = build_sudoku_graph(4)
        assert all(g.degree(v) == 7 for v in range(16))
        # cell 0 shares row 0, column 0 and the top-left box
        assert g.neighbors[0] == (1, 2, 3, 4, 5, 8, 12)

    @pytest.mark.unit
    def test_unsupported_side(self):
        with pytest.raises(ModelError):
            build_sudoku_graph(5)

    @pytest.mark.unit
    def test_mean_adjacency_rows(self, small_graph):
        cg = graph_to_constraint_graph(small_graph)
        a = cg.mean_adjacency()
        assert np.allclose(a[2], [1 / 3, 1 / 3, 0, 1 / 3, 0])
        # isolated node 4 aggregates nothing
        assert not a[4].any()

    @pytest.mark.unit
    def test_asymmetric_neighbors_rejected(self):
        with pytest.raises(ModelError, match="symmetric"):
            ConstraintGraph(2, ((1,), ()))

    @pytest.mark.unit
    def test_empty_graph_rejected(self):
        with pytest.raises(ModelError):
            graph_to_constraint_graph(Graph(node_count=0))


class TestForward:

    @pytest.mark.unit
    def test_output_shapes(self, tiny_sudoku_model):
        x = Assignment.from_string(PUZZLES_4X4[0])
        fr = tiny_sudoku_model.forward(x, build_sudoku_graph(4))
        assert fr.cell_logits.shape == (16, 4)
        assert fr.flag_logits.shape == (16, 1)
        assert np.allclose(fr.cell_probs.sum(axis=1), 1.0)
        assert np.all((fr.flag_probs > 0) & (fr.flag_probs < 1))

    @pytest.mark.unit
    def test_same_seed_same_outputs(self):
        x = Assignment.from_string(PUZZLES_4X4[1])
        g = build_sudoku_graph(4)
        a = ReflModel.for_sudoku(4, d=8, T=2, seed=5).forward(x, g)
        b = ReflModel.for_sudoku(4, d=8, T=2, seed=5).forward(x, g)
        assert np.array_equal(a.cell_logits.values, b.cell_logits.values)

    @pytest.mark.unit
    @pytest.mark.parametrize("model", [
        ReflModel.for_sudoku(4, d=8, T=2, seed=0),
        ReflModel.for_graphs(TaskEnum.CLIQUE, d=8, T=2, degree_cap=6),
    ], ids=["sudoku", "graph"])
    def test_embedding_init_bounded_by_fan_in(self, model):
        bound = 1.0 / np.sqrt(model.vocab)
        embed = model.params["embed"].values
        assert embed.shape == (model.vocab, model.d)
        assert np.abs(embed).max() <= bound
        assert np.abs(embed).max() > 0.5 * bound

    @pytest.mark.unit
    def test_size_mismatch(self, tiny_sudoku_model):
        with pytest.raises(ModelError, match="positions"):
            tiny_sudoku_model.forward(Assignment([0] * 15), build_sudoku_graph(4))

    @pytest.mark.unit
    def test_graph_model_is_permutation_equivariant(self, tiny_graph_model, small_graph):
        perm = np.array([3, 0, 4, 1, 2])  # node v becomes perm[v]
        permuted = Graph(node_count=5, edges=[(int(perm[u]), int(perm[v])) for u, v in small_graph.edges])
        fr = tiny_graph_model.forward(blank_input(5), graph_to_constraint_graph(small_graph))
        fp = tiny_graph_model.forward(blank_input(5), graph_to_constraint_graph(permuted))
        assert np.allclose(fp.cell_logits.values[perm], fr.cell_logits.values)
        assert np.allclose(fp.flag_logits.values[perm], fr.flag_logits.values)

    @pytest.mark.unit
    def test_sudoku_model_is_row_swap_equivariant(self):
        # rows 0 and 1 share a band, so swapping them maps the 4x4 graph onto itself
        model = ReflModel.for_sudoku(4)
        g = build_sudoku_graph(4)
        rows = np.array([1, 0, 2, 3])
        perm = np.array([4 * rows[i // 4] + i % 4 for i in range(16)])  # cell i becomes perm[i]
        x = Assignment.from_string(PUZZLES_4X4[0])
        values = np.zeros(16, dtype=int)
        values[perm] = x.values
        clue_mask = np.zeros(16, dtype=bool)
        clue_mask[perm] = x.clue_mask
        fr = model.forward(x, g)
        fp = model.forward(Assignment(values, clue_mask), g)
        assert np.allclose(fp.cell_logits.values[perm], fr.cell_logits.values)
        assert np.allclose(fp.flag_logits.values[perm], fr.flag_logits.values)

    @pytest.mark.unit
    def test_graph_input_symbols_clip_degree(self, small_graph):
        model = ReflModel.for_graphs(TaskEnum.MIS, d=4, T=1, degree_cap=2)
        symbols = model.input_symbols(blank_input(5), graph_to_constraint_graph(small_graph))
        assert list(symbols) == [2, 2, 2, 1, 0]


class TestDecode:

    @pytest.mark.unit
    def test_argmax_decode(self, tiny_sudoku_model):
        fr = tiny_sudoku_model.forward(Assignment.from_string(PUZZLES_4X4[0]), build_sudoku_graph(4))
        y_hat, r = decode(fr, "argmax")
        assert y_hat.is_complete()
        assert set(np.unique(y_hat.values)) <= {1, 2, 3, 4}
        assert np.array_equal(r, (fr.flag_probs >= 0.5).astype(int))

    @pytest.mark.unit
    def test_sample_decode_is_seeded(self, tiny_sudoku_model):
        fr = tiny_sudoku_model.forward(Assignment.from_string(PUZZLES_4X4[0]), build_sudoku_graph(4))
        a = decode(fr, "sample", seed=11)
        b = decode(fr, "sample", seed=11)
        assert a[0] == b[0] and np.array_equal(a[1], b[1])

    @pytest.mark.unit
    def test_unknown_mode(self, tiny_sudoku_model):
        fr = tiny_sudoku_model.forward(Assignment.from_string(PUZZLES_4X4[0]), build_sudoku_graph(4))
        with pytest.raises(ModelError):
            decode(fr, "beam")

    @pytest.mark.unit
    def test_joint_log_prob_matches_numpy(self, tiny_sudoku_model):
        fr = tiny_sudoku_model.forward(Assignment.from_string(PUZZLES_4X4[0]), build_sudoku_graph(4))
        y_hat, r = decode(fr, "argmax")
        p, q = fr.cell_probs, fr.flag_probs
        expected = np.log(p[np.arange(16), y_hat.values - 1]).sum() + np.sum(np.log(np.where(r == 1, q, 1 - q)))
        assert joint_log_prob(fr, y_hat, r).item() == pytest.approx(expected, rel=1e-9)


class TestModelGradients:

    @pytest.mark.unit
    def test_supervised_loss_gradients(self, tiny_sudoku_model):
        x = Assignment.from_string(PUZZLES_4X4[0])
        g = build_sudoku_graph(4)
        targets = Assignment.from_string(SOLVED_4X4).values - 1
        expr = lambda: ad.cross_entropy(tiny_sudoku_model.forward(x, g).cell_logits, targets)
        worst = finite_diff_check(expr, list(tiny_sudoku_model.params.values()), max_coordinates=6)
        assert worst < 1e-4

    @pytest.mark.unit
    def test_joint_log_prob_gradients(self, tiny_sudoku_model):
        x = Assignment.from_string(PUZZLES_4X4[2])
        g = build_sudoku_graph(4)
        fr = tiny_sudoku_model.forward(x, g)
        y_hat, r = decode(fr, "sample", seed=2)
        expr = lambda: joint_log_prob(tiny_sudoku_model.forward(x, g), y_hat, r)
        params = [tiny_sudoku_model.params[n] for n in ("refl.w", "refl.b", "out.w", "embed")]
        assert finite_diff_check(expr, params, max_coordinates=6) < 1e-4

    @pytest.mark.unit
    def test_tape_reaches_every_parameter(self, tiny_sudoku_model):
        x = Assignment.from_string(PUZZLES_4X4[0])
        with Tape() as tape:
            fr = tiny_sudoku_model.forward(x, build_sudoku_graph(4))
            loss = ad.add(ad.mean(fr.cell_logits), ad.mean(fr.flag_logits))
        grads = ad.backpropagate(tape, loss, tiny_sudoku_model.params)
        assert set(grads) == set(tiny_sudoku_model.params)


class TestPersistence:

    @pytest.mark.unit
    def test_save_and_load(self, tiny_sudoku_model, tmp_path):
        path = tmp_path / "model.ckpt"
        tiny_sudoku_model.save(path)
        loaded = ReflModel.load(path)
        assert loaded.arch == tiny_sudoku_model.arch
        x = Assignment.from_string(PUZZLES_4X4[0])
        g = build_sudoku_graph(4)
        assert np.array_equal(
            loaded.forward(x, g).cell_logits.values, tiny_sudoku_model.forward(x, g).cell_logits.values
        )

    @pytest.mark.unit
    def test_load_garbage(self, tmp_path):
        path = tmp_path / "garbage.ckpt"
        path.write_bytes(b"hello\n")
        with pytest.raises(ModelError):
            ReflModel.load(path)

    @pytest.mark.unit
    def test_from_config(self, tmp_path):
        config = TrainConfig(task="clique", train_data=tmp_path, d=6, T=1, degree_cap=5)
        model = ReflModel.from_config(config)
        assert model.arch["vocab"] == 6
        assert model.n_symbols == 2
