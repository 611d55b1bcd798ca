"""
Tests for metrics, reports, the bench commands and the CLI
"""

import json
import pytest
from src.bench import (
    MetricsAccumulator, RunMetrics, check_expectations, cmd_bench_solvers, cmd_eval, cmd_generate,
    cmd_graph_bench, cmd_sweep, evaluate_examples, parse_expectation, read_report, render_table, write_report,
)
from src.bench.cli import EXIT_EXPECTATION, EXIT_FAILED, EXIT_OK, main
from src.bench.commands import RUN_MANIFEST_NAME, REFL, SOLVER_ONLY
from src.config.train_config import BackendEnum, TaskEnum
from src.data.loader import CorpusLoader, manifest_path
from src.models import ModelError
from src.reflection import ExampleResult, parse_selector
from src.training import sudoku_examples


def _result(i: int, correct: bool, **kwargs) -> ExampleResult:
    values = dict(input_id=f"e{i}", flagged_count=i % 3, fallback_used=i % 2 == 0, correct=correct,
                  raw_correct=False, network_seconds=0.01 * i, abduction_seconds=0.02, kb_query_count=1 + i % 2,
                  blanks=i, recall=0.5, precision=1.0)
    values.update(kwargs)
    return ExampleResult(**values)


@pytest.fixture
def sudoku_checkpoint(tmp_path, tiny_sudoku_model):
    path = tmp_path / "sudoku.ckpt"
    tiny_sudoku_model.save(path)
    return path


@pytest.fixture
def puzzles(test_data_dir):
    return test_data_dir / "puzzles_4x4.csv"


class TestMetrics:

    @pytest.mark.unit
    def test_merge_is_associative(self):
        results = [_result(i, i % 4 != 0) for i in range(9)]
        a, b, c = (MetricsAccumulator.of(results[k:k + 3]) for k in (0, 3, 6))
        left = a.merge(b).merge(c).finalize("x")
        right = a.merge(b.merge(c)).finalize("x")
        whole = MetricsAccumulator.of(results).finalize("x")
        for key, value in left.model_dump().items():
            expected = getattr(right, key)
            assert value == (pytest.approx(expected) if isinstance(value, float) else expected)
        assert left.accuracy == pytest.approx(whole.accuracy)
        assert left.mean_network_seconds == pytest.approx(whole.mean_network_seconds)

    @pytest.mark.unit
    def test_finalize(self):
        metrics = MetricsAccumulator.of([_result(1, True), _result(2, False)]).finalize("run")
        assert metrics.examples == 2
        assert metrics.accuracy == 0.5
        assert metrics.fallback_rate == 0.5
        assert metrics.mean_kb_queries == 1.5
        assert metrics.recall == 0.5
        assert metrics.approx_ratio is None

    @pytest.mark.unit
    def test_empty_accumulator(self):
        metrics = MetricsAccumulator().finalize("empty")
        assert metrics.examples == 0 and metrics.accuracy == 0.0

    @pytest.mark.unit
    @pytest.mark.parametrize("text,metric,op,value", [
        ("accuracy>=0.99", "accuracy", ">=", 0.99),
        ("mean_flagged < 3", "mean_flagged", "<", 3.0),
        ("approx_ratio==1", "approx_ratio", "==", 1.0),
    ])
    def test_parse_expectation(self, text, metric, op, value):
        exp = parse_expectation(text)
        assert (exp.metric, exp.op, exp.value) == (metric, op, value)

    @pytest.mark.unit
    @pytest.mark.parametrize("text", ["accuracy", "accuracy=>1", "speed>=1", "label==1"])
    def test_bad_expectations(self, text):
        with pytest.raises(ValueError):
            parse_expectation(text)

    @pytest.mark.unit
    def test_check_expectations(self):
        row = RunMetrics(label="r", examples=4, accuracy=0.75, raw_accuracy=0.25)
        assert check_expectations([parse_expectation("accuracy>=0.5")], [row]) == []
        failures = check_expectations([parse_expectation("accuracy>0.9"), parse_expectation("recall>0")], [row])
        assert len(failures) == 2
        assert failures[0].startswith("r: expected accuracy>0.9")
        assert "got None" in failures[1]


class TestReports:

    @pytest.mark.unit
    def test_table_drops_empty_columns(self):
        rows = [RunMetrics(label="sat/solver-only", examples=3, accuracy=1.0, raw_accuracy=0.0)]
        table = render_table(rows, title="bench")
        assert table.splitlines()[0] == "bench"
        assert "sat/solver-only" in table and "1.0000" in table
        assert "approx_ratio" not in table

    @pytest.mark.unit
    def test_write_and_read_report(self, tmp_path):
        rows = [RunMetrics(label="a", examples=1, accuracy=1.0, raw_accuracy=1.0, approx_ratio=0.5)]
        paths = write_report(tmp_path / "out", "eval", rows, extra={"seed": 3})
        assert paths["text"].exists()
        assert json.loads(paths["json"].read_text())["seed"] == 3
        assert read_report(paths["json"]) == rows


class TestEvaluation:

    @pytest.mark.unit
    def test_reflection_on_unique_puzzles_is_always_correct(self, tiny_sudoku_model, records_4x4):
        run = evaluate_examples(tiny_sudoku_model, sudoku_examples(records_4x4), parse_selector("reflection"))
        assert run.metrics.accuracy == 1.0
        assert [r.input_id for r in run.results] == ["sudoku-0", "sudoku-1", "sudoku-2"]
        assert run.metrics.label == "reflection"

    @pytest.mark.integration
    def test_worker_count_does_not_change_metrics(self, tiny_sudoku_model, records_4x4):
        examples = sudoku_examples(records_4x4 * 2)
        serial = evaluate_examples(tiny_sudoku_model, examples, parse_selector("confidence:0.5"), workers=1)
        parallel = evaluate_examples(tiny_sudoku_model, examples, parse_selector("confidence:0.5"), workers=2)
        assert [r.input_id for r in parallel.results] == [r.input_id for r in serial.results]
        for key in ("accuracy", "raw_accuracy", "recall", "precision", "mean_flagged", "fallback_rate"):
            assert getattr(parallel.metrics, key) == pytest.approx(getattr(serial.metrics, key))


class TestCommands:

    @pytest.mark.integration
    def test_generate_sudoku(self, tmp_path):
        path = cmd_generate("sudoku", tmp_path / "p.csv", seed=2, count=3, side=4, clues=8)
        assert len(CorpusLoader().load_sudoku_csv(path)) == 3
        assert manifest_path(path).exists()

    @pytest.mark.integration
    def test_generate_graphs(self, tmp_path):
        path = cmd_generate("graphs", tmp_path / "graphs", seed=2, count=3, sizes=[6], ps=[0.5])
        assert len(CorpusLoader().load_graphs(path)) == 3
        assert CorpusLoader().read_manifest(path).record_count == 3

    @pytest.mark.unit
    def test_generate_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError):
            cmd_generate("mazes", tmp_path / "m")

    @pytest.mark.integration
    def test_eval_writes_reports(self, tmp_path, sudoku_checkpoint, puzzles):
        run = cmd_eval(sudoku_checkpoint, puzzles, "reflection", out=tmp_path / "out")
        assert run.metrics.accuracy == 1.0
        assert (tmp_path / "out" / "eval.json").exists()
        lines = (tmp_path / "out" / "eval_examples.jsonl").read_text().splitlines()
        assert len(lines) == 3

    @pytest.mark.unit
    def test_eval_rejects_wrong_task(self, sudoku_checkpoint, puzzles):
        with pytest.raises(ModelError):
            cmd_eval(sudoku_checkpoint, puzzles, task=TaskEnum.MIS)

    @pytest.mark.integration
    def test_bench_solvers(self, sudoku_checkpoint, puzzles):
        rows = cmd_bench_solvers(puzzles, checkpoint=sudoku_checkpoint)
        by_label = {row.label: row for row in rows}
        assert set(by_label) == {"sat/solver-only", "sat/refl", "csp/solver-only", "csp/refl"}
        for backend in ("sat", "csp"):
            solver_only = by_label[f"{backend}/{SOLVER_ONLY}"]
            refl = by_label[f"{backend}/{REFL}"]
            assert solver_only.accuracy == 1.0
            assert solver_only.mean_blanks == solver_only.mean_clue_blanks
            assert refl.mean_blanks <= solver_only.mean_blanks

    @pytest.mark.unit
    def test_refl_mode_needs_checkpoint(self, puzzles):
        with pytest.raises(ValueError, match="checkpoint"):
            cmd_bench_solvers(puzzles, backends=[BackendEnum.SAT], modes=[REFL])

    @pytest.mark.integration
    def test_graph_bench_exact_solver(self):
        metrics = cmd_graph_bench(TaskEnum.MIS, count=4, sizes=[8], ps=[0.4], seed=1)
        assert metrics.label == "mis/solver"
        assert metrics.approx_ratio == 1.0
        assert metrics.accuracy == 1.0

    @pytest.mark.integration
    def test_graph_bench_with_model(self, tmp_path, tiny_graph_model, test_data_dir):
        checkpoint = tmp_path / "clique.ckpt"
        tiny_graph_model.save(checkpoint)
        metrics = cmd_graph_bench(TaskEnum.CLIQUE, data=test_data_dir / "graphs", checkpoint=checkpoint)
        assert metrics.examples == 2
        assert 0.0 <= metrics.approx_ratio <= 1.0

    @pytest.mark.unit
    def test_graph_bench_rejects_sudoku(self):
        with pytest.raises(ValueError):
            cmd_graph_bench(TaskEnum.SUDOKU)

    @pytest.mark.integration
    def test_retain_sweep(self, tmp_path, sudoku_checkpoint, puzzles):
        rows = cmd_sweep(tmp_path / "unused.conf", "retain", ["0.5", "0.9"],
                         checkpoint=sudoku_checkpoint, data=puzzles)
        assert [row.label for row in rows] == ["reflection", "confidence:0.5", "confidence:0.9"]
        assert rows[1].mean_flagged >= rows[2].mean_flagged


def _write_config(tmp_path, train_data, **extra) -> str:
    lines = ["task = sudoku", "side = 4", "d = 8", "T = 2", "epochs = 1", "batch = 2", "lr = 0.01",
             "seed = 3", f"train_data = {train_data}", f"out_dir = {tmp_path / 'run'}"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path = tmp_path / "tiny.conf"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestCli:

    @pytest.mark.integration
    def test_generate(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["generate", "sudoku", "--out", str(out), "--count", "2", "--seed", "4"]) == EXIT_OK
        assert out.exists()

    @pytest.mark.integration
    def test_eval_expectation_holds(self, sudoku_checkpoint, puzzles, capsys):
        code = main(["eval", "--checkpoint", str(sudoku_checkpoint), "--data", str(puzzles),
                     "--expect", "accuracy>=0.99"])
        assert code == EXIT_OK
        assert "accuracy" in capsys.readouterr().out

    @pytest.mark.integration
    def test_eval_expectation_fails(self, sudoku_checkpoint, puzzles, capsys):
        code = main(["eval", "--checkpoint", str(sudoku_checkpoint), "--data", str(puzzles),
                     "--expect", "accuracy>=0.99", "--expect", "mean_flagged>100"])
        assert code == EXIT_EXPECTATION
        assert "expectation failed" in capsys.readouterr().err

    @pytest.mark.unit
    def test_missing_checkpoint_fails(self, tmp_path, puzzles):
        code = main(["eval", "--checkpoint", str(tmp_path / "none.ckpt"), "--data", str(puzzles)])
        assert code == EXIT_FAILED

    @pytest.mark.unit
    def test_unparseable_expectation_is_a_usage_error(self, sudoku_checkpoint, puzzles):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "--checkpoint", str(sudoku_checkpoint), "--data", str(puzzles), "--expect", "bogus"])
        assert exc.value.code == 2

    @pytest.mark.integration
    def test_train_writes_manifest_with_flag_seed(self, tmp_path, puzzles):
        config = _write_config(tmp_path, puzzles, test_data=puzzles)
        assert main(["train", "--config", config, "--seed", "11", "--expect", "examples==3"]) == EXIT_OK
        manifest = json.loads((tmp_path / "run" / RUN_MANIFEST_NAME).read_text())
        assert manifest["seed"] == 11
        assert manifest["config"]["seed"] == "11"
        assert manifest["command"] == "train"
        assert (tmp_path / "run" / "test.json").exists()

    @pytest.mark.integration
    def test_train_out_replaces_config_out_dir(self, tmp_path, puzzles):
        config = _write_config(tmp_path, puzzles)
        out = tmp_path / "elsewhere"
        assert main(["train", "--config", config, "--out", str(out)]) == EXIT_OK
        assert (out / "model.ckpt").exists()
        assert (out / "metrics.jsonl").exists()
        manifest = json.loads((out / RUN_MANIFEST_NAME).read_text())
        assert manifest["config"]["out_dir"] == str(out)
        assert not (tmp_path / "run").exists()

    @pytest.mark.unit
    def test_train_missing_data_fails(self, tmp_path):
        config = _write_config(tmp_path, tmp_path / "missing.csv")
        assert main(["train", "--config", config]) == EXIT_FAILED

    @pytest.mark.unit
    def test_train_unknown_key_fails(self, tmp_path, puzzles):
        config = _write_config(tmp_path, puzzles, learning_rate=0.1)
        assert main(["train", "--config", config]) == EXIT_FAILED
