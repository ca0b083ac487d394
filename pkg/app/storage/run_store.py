"""Run directory persistence: config.json, candidates.jsonl and best.csv.

``candidates.jsonl`` holds one Candidate per line, appended round by round. A round is
committed once its ``best.csv`` row is written, which always happens after the round's
candidates have been flushed to disk.
"""
import csv
import io
import json
import logging
import os
from pathlib import Path
from typing import IO, Iterable, List, Tuple, Union

from pydantic import ValidationError

from app.exceptions import RunStoreError
from app.models.evolution import BestPoint, Candidate, EvolutionConfig, EvolutionRun

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CONFIG_FILE = "config.json"
CANDIDATES_FILE = "candidates.jsonl"
BEST_FILE = "best.csv"
BEST_COLUMNS = ("round", "best_fitness", "best_candidate_id")


def _sync(handle: IO) -> None:
    handle.flush()
    os.fsync(handle.fileno())


def _candidate_line(candidate: Candidate) -> str:
    return candidate.model_dump_json() + "\n"


def _best_line(point: BestPoint) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(
        [point.round, repr(point.best_fitness), point.best_candidate_id]
    )
    return buffer.getvalue()


def _header_line() -> str:
    return ",".join(BEST_COLUMNS) + "\n"


def write_config(run: EvolutionRun, run_dir: PathLike) -> Path:
    """(Re)write ``config.json`` with the run's configuration and timestamps."""
    path = Path(run_dir) / CONFIG_FILE
    record = run.model_dump(mode="json", exclude={"candidates", "best_trajectory"})
    try:
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise RunStoreError(f"cannot write {path}: {e}") from e
    return path


def persist_run(run: EvolutionRun, run_dir: PathLike) -> Path:
    """
    Write the complete run to ``run_dir``, replacing any previous content.

    Raises:
        RunStoreError: the directory cannot be created or written
    """
    run_dir = Path(run_dir)
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
        write_config(run, run_dir)
        with (run_dir / CANDIDATES_FILE).open("w", encoding="utf-8", newline="\n") as handle:
            for candidate in run.candidates:
                handle.write(_candidate_line(candidate))
            _sync(handle)
        with (run_dir / BEST_FILE).open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(_header_line())
            for point in run.best_trajectory:
                handle.write(_best_line(point))
            _sync(handle)
    except OSError as e:
        raise RunStoreError(f"cannot write run directory {run_dir}: {e}") from e
    logger.debug(f"Persisted run with {len(run.candidates)} candidates to {run_dir}")
    return run_dir


def append_round(
    run_dir: PathLike, candidates: Iterable[Candidate], point: BestPoint
) -> None:
    """Append a round's candidates, then its best.csv row (the commit marker)."""
    run_dir = Path(run_dir)
    try:
        with (run_dir / CANDIDATES_FILE).open("a", encoding="utf-8", newline="\n") as handle:
            for candidate in candidates:
                handle.write(_candidate_line(candidate))
            _sync(handle)
        with (run_dir / BEST_FILE).open("a", encoding="utf-8", newline="\n") as handle:
            handle.write(_best_line(point))
            _sync(handle)
    except OSError as e:
        raise RunStoreError(f"cannot append round {point.round} to {run_dir}: {e}") from e


def _read_lines(path: Path) -> Tuple[List[str], bool]:
    """Lines of ``path`` and whether the file ends with a newline."""
    text = path.read_text(encoding="utf-8")
    return text.splitlines(), text.endswith("\n") or not text


def _load_candidates(path: Path) -> List[Candidate]:
    lines, complete = _read_lines(path)
    candidates: List[Candidate] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            candidates.append(Candidate.model_validate_json(line))
        except ValidationError as e:
            if number == len(lines) and not complete:
                logger.warning(f"Dropped truncated last line {number} of {path}")
                break
            raise RunStoreError(f"{path}, line {number}: corrupt candidate record") from e
    return candidates


def _load_best(path: Path) -> List[BestPoint]:
    lines, complete = _read_lines(path)
    if not lines or tuple(lines[0].split(",")) != BEST_COLUMNS:
        raise RunStoreError(f"{path}: missing header {','.join(BEST_COLUMNS)}")
    points: List[BestPoint] = []
    for number, row in enumerate(csv.reader(lines[1:]), start=2):
        try:
            round_index, fitness, candidate_id = row
            points.append(
                BestPoint(
                    round=int(round_index),
                    best_fitness=float(fitness),
                    best_candidate_id=int(candidate_id),
                )
            )
        except ValueError as e:
            if number == len(lines) and not complete:
                logger.warning(f"Dropped truncated last line {number} of {path}")
                break
            raise RunStoreError(f"{path}, line {number}: malformed row") from e
    return points


def load_run(run_dir: PathLike) -> EvolutionRun:
    """
    Reconstruct a run from ``run_dir``.

    A truncated final line in candidates.jsonl or best.csv (an interrupted write) is
    dropped with a warning; any other damage is an error.

    Raises:
        RunStoreError: missing or corrupt files
    """
    run_dir = Path(run_dir)
    for name in (CONFIG_FILE, CANDIDATES_FILE, BEST_FILE):
        if not (run_dir / name).is_file():
            raise RunStoreError(f"missing {name} in {run_dir}")

    config_path = run_dir / CONFIG_FILE
    try:
        record = json.loads(config_path.read_text(encoding="utf-8"))
        EvolutionConfig.model_validate(record.get("config"))
    except (json.JSONDecodeError, ValidationError, AttributeError) as e:
        raise RunStoreError(f"{config_path}: corrupt run configuration") from e

    try:
        return EvolutionRun.model_validate(
            {
                **record,
                "candidates": _load_candidates(run_dir / CANDIDATES_FILE),
                "best_trajectory": _load_best(run_dir / BEST_FILE),
            }
        )
    except ValidationError as e:
        raise RunStoreError(f"{run_dir}: inconsistent run ({e.errors()[0]['msg']})") from e
