"""Tests for run directory persistence."""
from datetime import datetime, timezone

import numpy as np
import pytest

from app.exceptions import RunStoreError
from app.graph.runner import run_evolution
from app.models.complexity import ComplexityReport
from app.models.evolution import BestPoint, Candidate, EvolutionConfig, EvolutionRun
from app.storage.run_store import (
    BEST_FILE,
    CANDIDATES_FILE,
    CONFIG_FILE,
    append_round,
    load_run,
    persist_run,
)
from app.utils.llm_mock import MockMutationClient


def _run():
    candidates = [
        Candidate(id=0, source="-sum(lp)", fitness=0.61, round=0, proposer="seed"),
        Candidate(id=1, source="mean(", failure_reason="syntax error at offset 6", round=1,
                  parent_ids=[0], proposer="mock"),
        Candidate(id=2, source="max(-lp)", fitness=0.64, round=1, parent_ids=[0],
                  proposer="mock", lint=["uses 1 distinct features"]),
    ]
    return EvolutionRun(
        config=EvolutionConfig(rounds=3, seed=9, constraints=["Keep it short."]),
        dataset_name="planted",
        dataset_digest="abc",
        candidates=candidates,
        best_trajectory=[
            BestPoint(round=0, best_fitness=0.61, best_candidate_id=0),
            BestPoint(round=1, best_fitness=0.64, best_candidate_id=2),
        ],
        started=datetime(2026, 1, 2, 3, 4, 5, tzinfo=timezone.utc),
    )


def test_persist_and_load_roundtrip(run_dir):
    """Everything written is read back unchanged."""
    run = _run()
    persist_run(run, run_dir)
    assert load_run(run_dir) == run
    header = (run_dir / BEST_FILE).read_text().splitlines()[0]
    assert header == "round,best_fitness,best_candidate_id"


def test_append_round(run_dir):
    """Appended rounds extend the stored pool and trajectory."""
    run = _run()
    persist_run(run, run_dir)
    extra = Candidate(id=3, source="n", fitness=0.5, round=2, parent_ids=[2], proposer="mock")
    append_round(run_dir, [extra], BestPoint(round=2, best_fitness=0.64, best_candidate_id=2))
    loaded = load_run(run_dir)
    assert loaded.candidates[-1] == extra
    assert loaded.completed_rounds == 2


def test_truncated_last_line_is_dropped(run_dir, caplog):
    """An interrupted write loses only the partial record."""
    persist_run(_run(), run_dir)
    path = run_dir / CANDIDATES_FILE
    path.write_text(path.read_text() + '{"id": 3, "source": "n", "fit')
    loaded = load_run(run_dir)
    assert len(loaded.candidates) == 3
    assert "truncated" in caplog.text


def test_corrupt_middle_line_is_an_error(run_dir):
    """Damage before the last line is not silently skipped."""
    persist_run(_run(), run_dir)
    path = run_dir / CANDIDATES_FILE
    lines = path.read_text().splitlines()
    lines[1] = "{broken"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(RunStoreError, match="line 2"):
        load_run(run_dir)


def test_missing_files(tmp_path):
    """Every run file is required."""
    with pytest.raises(RunStoreError, match="missing config.json"):
        load_run(tmp_path)
    persist_run(_run(), tmp_path)
    (tmp_path / BEST_FILE).unlink()
    with pytest.raises(RunStoreError, match=f"missing {BEST_FILE}"):
        load_run(tmp_path)


def test_corrupt_config(run_dir):
    """An unreadable config.json is reported as such."""
    persist_run(_run(), run_dir)
    (run_dir / CONFIG_FILE).write_text("{not json")
    with pytest.raises(RunStoreError, match="corrupt run configuration"):
        load_run(run_dir)


def test_best_file_needs_header(run_dir):
    """best.csv must start with its column header."""
    persist_run(_run(), run_dir)
    (run_dir / BEST_FILE).write_text("0,0.61,0\n")
    with pytest.raises(RunStoreError, match="missing header"):
        load_run(run_dir)


def test_decreasing_trajectory_is_rejected(run_dir):
    """A stored best trajectory must never decrease."""
    persist_run(_run(), run_dir)
    with (run_dir / BEST_FILE).open("a") as handle:
        handle.write("2,0.1,0\n")
    with pytest.raises(RunStoreError, match="inconsistent run"):
        load_run(run_dir)


def _random_run(rng):
    rounds = int(rng.integers(0, 6))
    candidates = [Candidate(id=0, source="-sum(lp)", fitness=float(rng.uniform()), round=0,
                            proposer="seed")]
    trajectory = [BestPoint(round=0, best_fitness=candidates[0].fitness, best_candidate_id=0)]
    for round_index in range(1, rounds + 1):
        for _ in range(int(rng.integers(0, 4))):
            cid = len(candidates)
            parents = sorted({int(p) for p in rng.integers(0, cid, size=2)})
            fields = dict(id=cid, round=round_index, parent_ids=parents, proposer="mock")
            if rng.random() < 0.3:
                candidates.append(Candidate(source=f"mean(lp) + {cid}",
                                            failure_reason="syntax error", **fields))
                continue
            complexity = ComplexityReport(
                line_count=1,
                ast_nodes=int(rng.integers(1, 30)),
                unary_ops=int(rng.integers(0, 5)),
                binary_ops=int(rng.integers(0, 10)),
                halstead_volume=float(rng.uniform(0.0, 100.0)),
            )
            candidates.append(Candidate(source=f"max(lp) * {cid}", fitness=float(rng.uniform()),
                                        complexity=complexity, score_digest=f"{cid:064x}",
                                        **fields))
        best = max((c for c in candidates if not c.failed), key=lambda c: (c.fitness, -c.id))
        trajectory.append(BestPoint(round=round_index, best_fitness=best.fitness,
                                    best_candidate_id=best.id))
    return EvolutionRun(
        config=EvolutionConfig(rounds=rounds, seed=int(rng.integers(0, 2**32)),
                               t_cand_sampling=float(rng.uniform(0.01, 2.0))),
        dataset_name="random",
        dataset_digest=f"{int(rng.integers(0, 2**32)):064x}",
        candidates=candidates,
        best_trajectory=trajectory,
        started=datetime(2026, 5, 6, 7, 8, 9, 123456, tzinfo=timezone.utc),
    )


def test_random_runs_roundtrip(tmp_path):
    """Ten random runs load back equal to what was persisted."""
    rng = np.random.default_rng(0)
    for index in range(10):
        run = _random_run(rng)
        persist_run(run, tmp_path / f"run{index}")
        assert load_run(tmp_path / f"run{index}") == run


def test_resume_after_interrupted_write(planted_dataset, tmp_path):
    """Truncated tails of both run files are dropped and the resumed run matches a clean one."""
    interrupted, clean = tmp_path / "interrupted", tmp_path / "clean"
    run = run_evolution(EvolutionConfig(rounds=3, seed=3), planted_dataset,
                        MockMutationClient(3), interrupted)
    orphan = Candidate(id=len(run.candidates), source="n", fitness=0.5, round=4,
                       proposer="mock")
    with (interrupted / CANDIDATES_FILE).open("a", encoding="utf-8") as handle:
        handle.write(orphan.model_dump_json() + "\n" + '{"id": 99, "sou')
    with (interrupted / BEST_FILE).open("a", encoding="utf-8") as handle:
        handle.write("4,0.9")
    assert load_run(interrupted).completed_rounds == 3

    config = EvolutionConfig(rounds=5, seed=3)
    resumed = run_evolution(config, planted_dataset, MockMutationClient(3), interrupted,
                            resume=True)
    straight = run_evolution(config, planted_dataset, MockMutationClient(3), clean)
    assert resumed.candidates == straight.candidates
    assert resumed.best_trajectory == straight.best_trajectory
