"""Tests for the command-line interface."""
import csv
import json
from datetime import datetime, timezone

import pytest

from app.exceptions import MetricError
from app.main import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from app.metrics.ranking import spearman
from app.models.complexity import ComplexityReport
from app.models.evolution import BestPoint, Candidate, EvolutionConfig, EvolutionRun
from app.models.scores import ScoreVector
from app.storage.run_store import load_run, persist_run


def _synth(path, *extra):
    return main(
        ["synth", "--n", "200", "--max-len", "20", "--planted", "last_logprob=3",
         "--noise", "0.3", "--seed", "1", "-o", str(path), *extra]
    )


def _rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "planted.jsonl"
    assert _synth(path) == EXIT_OK
    return path


@pytest.fixture
def run_path(tmp_path, data_file):
    path = tmp_path / "runs" / "r1"
    code = main(["evolve", "--data", str(data_file), "--rounds", "3", "--seed", "0",
                 "-o", str(path)])
    assert code == EXIT_OK
    return path


def test_synth_is_reproducible(tmp_path, data_file):
    """Equal seeds write byte-identical datasets plus a manifest."""
    again = tmp_path / "again.jsonl"
    assert _synth(again) == EXIT_OK
    assert len(data_file.read_text().splitlines()) == 200
    first = [json.loads(line) for line in data_file.read_text().splitlines()]
    second = [json.loads(line) for line in again.read_text().splitlines()]
    assert first == second
    manifest = json.loads((tmp_path / "planted.jsonl.manifest.json").read_text())
    assert manifest["command"] == "synth"
    assert manifest["config"]["seed"] == 1
    assert list(manifest["input_digests"]) == ["planted.jsonl"]


def test_synth_bytes_match(tmp_path):
    """Same arguments, same bytes."""
    a, b = tmp_path / "x" / "d.jsonl", tmp_path / "y" / "d.jsonl"
    assert _synth(a) == EXIT_OK and _synth(b) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--planted", "last_logprob=3"],
        ["synth", "-o", "out.jsonl"],
        ["synth", "--planted", "last_logprob", "-o", "out.jsonl"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv, tmp_path, monkeypatch):
    """Missing options, bad values and unknown commands exit with status 2."""
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_USAGE


def test_evolve_with_mock_client(run_path):
    """A mock search writes the run files and a manifest with results."""
    run = load_run(run_path)
    assert run.completed_rounds == 3
    assert run.candidates[0].source == "-sum(lp)"
    manifest = json.loads((run_path / "manifest.json").read_text())
    assert manifest["command"] == "evolve"
    assert manifest["results"]["best_fitness"] == run.best.fitness
    assert manifest["results"]["best_source"] == run.best.source


def test_evolve_mock_needs_seed(tmp_path, data_file):
    """The offline client must be seeded explicitly."""
    code = main(["evolve", "--data", str(data_file), "--rounds", "1", "-o", str(tmp_path / "r")])
    assert code == EXIT_USAGE


def test_evolve_resume(run_path, data_file):
    """Existing runs need --resume; resuming extends the run."""
    argv = ["evolve", "--data", str(data_file), "--seed", "0", "-o", str(run_path)]
    assert main([*argv, "--rounds", "5"]) == EXIT_RUNTIME
    assert main([*argv, "--rounds", "5", "--resume"]) == EXIT_OK
    assert load_run(run_path).completed_rounds == 5


def test_evolve_rejects_bad_settings(tmp_path, data_file):
    """Invalid search parameters are usage errors."""
    base = ["evolve", "--data", str(data_file), "--seed", "0", "-o", str(tmp_path / "r")]
    assert main([*base, "--parents", "3..1"]) == EXIT_USAGE
    assert main([*base, "--parents", "many"]) == EXIT_USAGE
    assert main([*base, "--t-cand", "0"]) == EXIT_USAGE


def test_eval_reports_metric_per_dataset(tmp_path, data_file):
    """Built-in names and program files are scored on every dataset."""
    second = tmp_path / "other.jsonl"
    _synth(second, "--name", "other")
    program = tmp_path / "last.dsl"
    program.write_text("-last(lp)  # last token\n")
    output = tmp_path / "eval.csv"
    code = main(["eval", "--estimator", "seq_log_prob", "--estimator", str(program),
                 "--data", str(data_file), "--data", str(second), "-o", str(output)])
    assert code == EXIT_OK
    header, *rows = _rows(output)
    assert header == ["estimator", "planted", "other", "mean", "dataset_digest"]
    assert [row[0] for row in rows] == ["seq_log_prob", "last"]
    assert all(0.0 <= float(value) <= 1.0 for row in rows for value in row[1:4])
    assert rows[0][4].count(";") == 1
    assert (tmp_path / "eval.csv.manifest.json").is_file()


def test_eval_json_with_intervals(tmp_path, data_file):
    """JSON reports carry bootstrap intervals when asked."""
    output = tmp_path / "eval.json"
    code = main(["eval", "--estimator", "perplexity", "--data", str(data_file), "--ci",
                 "--resamples", "1000", "-o", str(output)])
    assert code == EXIT_OK
    report = json.loads(output.read_text())
    (row,) = report["rows"]
    interval = row["intervals"]["planted"]
    assert interval["ci_low"] <= interval["ci_high"]


def test_eval_unknown_estimator(tmp_path, data_file):
    """Unknown estimator names are usage errors; unreadable data is a runtime error."""
    output = str(tmp_path / "e.csv")
    unknown = ["eval", "--estimator", "nope", "--data", str(data_file), "-o", output]
    assert main(unknown) == EXIT_USAGE
    missing = ["eval", "--estimator", "perplexity", "--data", str(tmp_path / "no.jsonl"),
               "-o", output]
    assert main(missing) == EXIT_RUNTIME


def test_compare(tmp_path, data_file):
    """The comparison table has one row per dataset."""
    program = tmp_path / "last.dsl"
    program.write_text("-last(lp)\n")
    output = tmp_path / "cmp.csv"
    code = main(["compare", "--a", str(program), "--b", "seq_log_prob", "--data",
                 str(data_file), "--resamples", "1000", "-o", str(output)])
    assert code == EXIT_OK
    header, row = _rows(output)
    assert header == ["dataset", "delta", "ci_low", "ci_high", "p", "verdict",
                      "dataset_digest"]
    assert row[0] == "planted"
    assert row[5] in ("win", "tie", "loss")


def test_similarity(tmp_path, data_file, run_path):
    """Methods and run candidates are correlated with the reference."""
    output = tmp_path / "sim.csv"
    code = main(["similarity", "--estimator", "perplexity", "--run", str(run_path),
                 "--data", str(data_file), "-o", str(output)])
    assert code == EXIT_OK
    header, *rows = _rows(output)
    assert header == ["method", "source", "similarity", "performance", "dataset_digest"]
    names = [row[0] for row in rows]
    assert "perplexity" in names
    assert "r1/candidate-0" in names
    seed_row = rows[names.index("r1/candidate-0")]
    assert float(seed_row[2]) == pytest.approx(1.0)
    matrix = _rows(tmp_path / "sim.matrix.csv")
    assert matrix[0][:2] == ["method", "seq_log_prob"]


def test_complexity(tmp_path, run_path):
    """Complexity rows and a per-run summary are written."""
    output = tmp_path / "cx.csv"
    assert main(["complexity", "--run", str(run_path), "-o", str(output)]) == EXIT_OK
    header, *rows = _rows(output)
    assert header[:3] == ["run", "candidate_id", "round"]
    assert header[-2:] == ["fitness", "dataset_digest"]
    assert rows[0][:3] == ["r1", "0", "0"]
    summary = json.loads((tmp_path / "cx.summary.json").read_text())
    assert summary["runs"][0]["run"] == "r1"

    ids = tuple(row[1] for row in rows)
    fitness = ScoreVector(ids=ids, scores=tuple(float(row[-2]) for row in rows))
    reported = summary["runs"][0]["spearman_with_fitness"]
    for column, name in enumerate(header[3:-2], start=3):
        proxy = ScoreVector(ids=ids, scores=tuple(float(row[column]) for row in rows))
        try:
            expected = spearman(proxy, fitness)
        except MetricError:
            expected = None
        assert reported[name] == (None if expected is None else pytest.approx(expected))


def _complexity_run(line_counts):
    candidates = [
        Candidate(
            id=i,
            source=f"n + {i}",
            fitness=float(lines),
            round=0,
            proposer="seed",
            complexity=ComplexityReport(
                line_count=lines, ast_nodes=3, unary_ops=0, binary_ops=1, halstead_volume=4.75
            ),
        )
        for i, lines in enumerate(line_counts)
    ]
    best = max(candidates, key=lambda c: c.fitness)
    return EvolutionRun(
        config=EvolutionConfig(rounds=0),
        dataset_name="built",
        candidates=candidates,
        best_trajectory=[BestPoint(round=0, best_fitness=best.fitness,
                                   best_candidate_id=best.id)],
        started=datetime(2026, 1, 1, tzinfo=timezone.utc),
    )


def test_complexity_summary_edge_cases(tmp_path):
    """Fitness equal to line count correlates at 1; a lone candidate reports nulls."""
    persist_run(_complexity_run([3, 1, 4, 2]), tmp_path / "monotone")
    persist_run(_complexity_run([2]), tmp_path / "single")
    output = tmp_path / "cx.csv"
    code = main(["complexity", "--run", str(tmp_path / "monotone"), "--run",
                 str(tmp_path / "single"), "-o", str(output)])
    assert code == EXIT_OK
    monotone, single = json.loads((tmp_path / "cx.summary.json").read_text())["runs"]
    assert monotone["spearman_with_fitness"]["line_count"] == pytest.approx(1.0)
    assert monotone["spearman_with_fitness"]["ast_nodes"] is None
    assert all(value is None for value in single["spearman_with_fitness"].values())


def test_logreg(tmp_path, data_file):
    """The supervised reference reports weights and held-out ROC-AUC."""
    output = tmp_path / "lr.json"
    code = main(["logreg", "--train", str(data_file), "--feature", "last_logprob",
                 "--feature", "mean_logprob", "-o", str(output)])
    assert code == EXIT_OK
    report = json.loads(output.read_text())
    assert report["feature_names"] == ["last_logprob", "mean_logprob"]
    assert report["weights"]["last_logprob"] > 0
    assert report["test_roc_auc"] > 0.65


def test_select(tmp_path, data_file, run_path):
    """Top candidates are ranked on validation data."""
    output = tmp_path / "sel.csv"
    code = main(["select", "--run", str(run_path), "--data", str(data_file), "--top-k", "2",
                 "-o", str(output)])
    assert code == EXIT_OK
    header, *rows = _rows(output)
    assert header[:2] == ["rank", "candidate_id"]
    assert header[-1] == "dataset_digest"
    assert [row[0] for row in rows] == ["1", "2"][: len(rows)]


def test_toml_config_supplies_defaults(tmp_path):
    """Config tables act as defaults; explicit flags still win."""
    config = tmp_path / "uq.toml"
    config.write_text(
        '[synth]\nn = 50\nplanted = ["last_logprob=2"]\nseed = 3\nmax-len = 10\n',
        encoding="utf-8",
    )
    output = tmp_path / "cfg.jsonl"
    assert main(["--config", str(config), "synth", "--n", "30", "-o", str(output)]) == EXIT_OK
    assert len(output.read_text().splitlines()) == 30
    manifest = json.loads((tmp_path / "cfg.jsonl.manifest.json").read_text())
    assert manifest["config"]["seed"] == 3


def test_toml_config_errors(tmp_path):
    """Unknown tables and keys are usage errors."""
    config = tmp_path / "bad.toml"
    config.write_text("[synth]\ncolour = 1\n", encoding="utf-8")
    assert main(["--config", str(config), "synth", "-o", "x.jsonl"]) == EXIT_USAGE
    config.write_text("[nothing]\nn = 1\n", encoding="utf-8")
    assert main(["--config", str(config), "synth", "-o", "x.jsonl"]) == EXIT_USAGE
    assert main(["--config", str(tmp_path / "none.toml"), "synth"]) == EXIT_USAGE
