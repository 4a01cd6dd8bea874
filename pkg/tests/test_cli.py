"""Subcommand behavior, plan schema, and exit codes."""

import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from framesieve.cli import main
from framesieve.scoring import ScoreMatrix, save_score_file

PLAN_KEYS = {
    "video_id",
    "k",
    "strategy",
    "alpha_final",
    "alpha_history",
    "clips",
    "slow_indices",
    "fast_indices",
    "selected",
    "queries",
    "fallback_used",
}


@pytest.fixture
def runner():
    return CliRunner()


def write_scores(path, rows, labels=None):
    rows = np.asarray(rows, dtype=np.float64)
    labels = labels or tuple(f"query {i}" for i in range(rows.shape[0]))
    save_score_file(ScoreMatrix(rows=rows, query_labels=tuple(labels)), path)
    return path


def two_bump_rows(t=200):
    rng = np.random.default_rng(7)
    idx = np.arange(t, dtype=np.float64)
    row = 0.9 * np.exp(-((idx - 50) ** 2) / 50) + 0.7 * np.exp(-((idx - 150) ** 2) / 40)
    row = np.clip(row + rng.normal(0, 0.02, size=t), 0, 1)
    return np.stack([row, np.roll(row, 3)])


class TestPlanCommand:
    def test_uniform_fixture(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", np.full((1, 100), 0.3))
        result = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "4", "--strategy", "uniform"])
        assert result.exit_code == 0, result.output
        plan = json.loads(result.output)
        assert plan["selected"] == [12, 37, 62, 87]
        assert plan["strategy"] == "uniform"
        assert plan["fallback_used"] == "none"
        assert plan["alpha_final"] is None

    def test_schema_keys_complete(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", two_bump_rows())
        result = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "8"])
        assert result.exit_code == 0, result.output
        plan = json.loads(result.output)
        assert set(plan) == PLAN_KEYS
        assert plan["video_id"] == "video"
        assert plan["queries"]["source"] == "precomputed"
        assert plan["queries"]["items"] == ["query 0", "query 1"]

    def test_constant_scores_degrade_to_uniform(self, runner, tmp_path):
        scores = write_scores(tmp_path / "flat.json", np.full((2, 100), 0.5))
        tcs = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "4"])
        uniform = runner.invoke(
            main, ["plan", "--scores", str(scores), "--k", "4", "--strategy", "uniform"]
        )
        assert tcs.exit_code == 0 and uniform.exit_code == 0
        tcs_plan = json.loads(tcs.output)
        assert tcs_plan["selected"] == json.loads(uniform.output)["selected"]
        assert tcs_plan["fallback_used"] == "uniform_fill"

    def test_k_zero_is_usage_error(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", np.full((1, 10), 0.5))
        result = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "0"])
        assert result.exit_code == 2
        assert "k must be" in result.output

    def test_missing_file_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["plan", "--scores", str(tmp_path / "nope.json"), "--k", "4"])
        assert result.exit_code == 2

    def test_output_file_matches_stdout(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", two_bump_rows())
        out_path = tmp_path / "plan.json"
        to_stdout = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "8"])
        to_file = runner.invoke(
            main, ["plan", "--scores", str(scores), "--k", "8", "--output", str(out_path)]
        )
        assert to_file.exit_code == 0
        assert out_path.read_text() == to_stdout.output

    def test_plan_bytes_stable_across_runs(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", two_bump_rows())
        outputs = set()
        for _ in range(3):
            result = runner.invoke(main, ["plan", "--scores", str(scores), "--k", "8"])
            outputs.add(result.output)
        assert len(outputs) == 1

    def test_topk_strategy(self, runner, tmp_path):
        rows = np.zeros((1, 50))
        rows[0, [7, 20, 33]] = [0.9, 0.8, 0.7]
        scores = write_scores(tmp_path / "video.json", rows)
        result = runner.invoke(
            main, ["plan", "--scores", str(scores), "--k", "3", "--strategy", "topk"]
        )
        assert json.loads(result.output)["selected"] == [7, 20, 33]


class TestRunCommand:
    def test_precomputed_mode_skips_queries(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", two_bump_rows(), labels=("label a", "label b"))
        result = runner.invoke(main, ["run", "--scores", str(scores), "--k", "8"])
        assert result.exit_code == 0, result.output
        plan = json.loads(result.output)
        assert plan["queries"] == {"source": "precomputed", "items": ["label a", "label b"]}

    def test_mock_endpoint_with_score_file(self, runner, tmp_path):
        scores = write_scores(tmp_path / "video.json", two_bump_rows())
        reply = tmp_path / "reply.txt"
        reply.write_text('["a red car", "a bridge at night"]', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "What happens after the car stops?",
                "--scores", str(scores),
                "--endpoint-url", f"mock:{reply}",
                "--k", "8",
            ],
        )
        assert result.exit_code == 0, result.output
        plan = json.loads(result.output)
        assert plan["queries"]["source"] == "generated"
        assert plan["queries"]["items"] == ["a red car", "a bridge at night"]

    def test_full_pipeline_with_mock_scorer(self, runner, tmp_path, frame_factory):
        frames = frame_factory(tmp_path / "clip042", 60)
        reply = tmp_path / "reply.txt"
        reply.write_text('["a red car"]', encoding="utf-8")
        args = [
            "run",
            "--question", "Where does the car go?",
            "--frames-dir", str(frames),
            "--endpoint-url", f"mock:{reply}",
            "--mock-scorer",
            "--seed", "11",
            "--k", "8",
        ]
        first = runner.invoke(main, args)
        assert first.exit_code == 0, first.output
        plan = json.loads(first.output)
        assert plan["video_id"] == "clip042"
        assert len(plan["selected"]) == 8
        threaded = runner.invoke(main, args + ["--jobs", "4"])
        assert threaded.output == first.output

    def test_failing_endpoint_degrades_to_fallback_query(self, runner, tmp_path, frame_factory, monkeypatch):
        monkeypatch.setenv("FRAMESIEVE_API_KEY", "k")
        frames = frame_factory(tmp_path / "clip", 30)
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "What color is the car?",
                "--frames-dir", str(frames),
                "--endpoint-url", "http://127.0.0.1:9",  # nothing listens there
                "--mock-scorer",
                "--k", "4",
            ],
        )
        assert result.exit_code == 0, result.output
        plan = json.loads(result.output)
        assert plan["queries"]["source"] == "fallback_question"
        assert plan["queries"]["items"] == ["What color is the car?"]

    def test_missing_api_key_is_configuration_error(self, runner, tmp_path, frame_factory, monkeypatch):
        monkeypatch.delenv("FRAMESIEVE_API_KEY", raising=False)
        frames = frame_factory(tmp_path / "clip", 10)
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "q",
                "--frames-dir", str(frames),
                "--endpoint-url", "https://chat.example/v1",
                "--mock-scorer",
                "--k", "4",
            ],
        )
        assert result.exit_code == 2
        assert "FRAMESIEVE_API_KEY" in result.output

    def test_requires_question_or_scores(self, runner):
        result = runner.invoke(main, ["run", "--k", "4"])
        assert result.exit_code == 2

    def test_question_requires_endpoint(self, runner, tmp_path):
        scores = write_scores(tmp_path / "v.json", np.full((1, 10), 0.5))
        result = runner.invoke(
            main, ["run", "--question", "q", "--scores", str(scores), "--k", "4"]
        )
        assert result.exit_code == 2
        assert "--endpoint-url" in result.output

    def test_exactly_one_scorer(self, runner, tmp_path, frame_factory):
        frames = frame_factory(tmp_path / "clip", 10)
        scores = write_scores(tmp_path / "v.json", np.full((1, 10), 0.5))
        reply = tmp_path / "reply.txt"
        reply.write_text('["x"]', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "q",
                "--endpoint-url", f"mock:{reply}",
                "--frames-dir", str(frames),
                "--scores", str(scores),
                "--mock-scorer",
                "--k", "4",
            ],
        )
        assert result.exit_code == 2
        assert "exactly one scorer" in result.output

    def test_embed_url_requires_frames_dir(self, runner, tmp_path):
        reply = tmp_path / "reply.txt"
        reply.write_text('["x"]', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "q",
                "--endpoint-url", f"mock:{reply}",
                "--embed-url", "https://embed.example/v1",
                "--api-key-env", "",
                "--k", "4",
            ],
        )
        assert result.exit_code == 2
        assert "--frames-dir" in result.output

    def test_unreachable_embed_service_is_runtime_error(self, runner, tmp_path, frame_factory):
        frames = frame_factory(tmp_path / "clip", 4)
        reply = tmp_path / "reply.txt"
        reply.write_text('["x"]', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "q",
                "--endpoint-url", f"mock:{reply}",
                "--embed-url", "http://127.0.0.1:9/embed",
                "--api-key-env", "",
                "--frames-dir", str(frames),
                "--k", "4",
            ],
        )
        assert result.exit_code == 3
        assert "error:" in result.output

    def test_score_file_frame_count_must_match_manifest(self, runner, tmp_path, frame_factory):
        frames = frame_factory(tmp_path / "clip", 10)
        scores = write_scores(tmp_path / "v.json", np.full((1, 12), 0.5))
        reply = tmp_path / "reply.txt"
        reply.write_text('["x"]', encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "run",
                "--question", "q",
                "--endpoint-url", f"mock:{reply}",
                "--frames-dir", str(frames),
                "--scores", str(scores),
                "--k", "4",
            ],
        )
        assert result.exit_code == 2
        assert "12 frames" in result.output


class TestBenchCommand:
    def test_sweep_both_row_count(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            [
                "bench",
                "--t", "300",
                "--k", "8",
                "--num-seeds", "2",
                "--strategies", "tcs,uniform",
                "--sweep", "both",
                "--intervals", "50-90,200-240",
                "--amplitudes", "0.9,0.7",
                "--output", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        with open(out, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 2 * 2 * 4 * 5

    def test_no_sweep_row_count(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            ["bench", "--num-seeds", "3", "--strategies", "uniform", "--output", str(out)],
        )
        assert result.exit_code == 0, result.output
        with open(out, newline="") as handle:
            assert len(list(csv.DictReader(handle))) == 3

    def test_summary_printed(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            ["bench", "--num-seeds", "1", "--strategies", "uniform", "--output", str(out)],
        )
        assert "hit_rate" in result.output
        assert "wrote 1 rows" in result.output

    def test_bad_intervals_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["bench", "--intervals", "oops", "--output", str(tmp_path / "b.csv")],
        )
        assert result.exit_code == 2

    def test_empty_strategies_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["bench", "--strategies", " , ", "--output", str(tmp_path / "b.csv")],
        )
        assert result.exit_code == 2

    def test_amplitude_mismatch_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "bench",
                "--intervals", "10-20",
                "--amplitudes", "0.9,0.7",
                "--output", str(tmp_path / "b.csv"),
            ],
        )
        assert result.exit_code == 2
