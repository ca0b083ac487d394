"""The evolution loop: seeding, rounds, persistence and resume."""
import logging
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import List, Optional, Union

import anyio

from app.data.arrays import prepare, quality_array
from app.data.store import dataset_digest
from app.exceptions import EvolutionError, MetricError, RunStoreError
from app.graph.evaluation import evaluate_candidate
from app.graph.graph import create_round_workflow
from app.metrics.fitness import check_metric_dataset
from app.models.dataset import Dataset
from app.models.evolution import (
    SEED_PROPOSER,
    BestPoint,
    Candidate,
    EvolutionConfig,
    EvolutionRun,
)
from app.models.graph_state import RoundState
from app.storage.run_store import (
    CANDIDATES_FILE,
    CONFIG_FILE,
    append_round,
    load_run,
    persist_run,
    write_config,
)
from app.utils.llm_client import MutationClient

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def best_of(pool: List[Candidate]) -> Candidate:
    """Fittest valid candidate; the oldest wins ties."""
    return max((c for c in pool if not c.failed), key=lambda c: (c.fitness, -c.id))


def _restore(
    config: EvolutionConfig, train: Dataset, digest: str, run_dir: Path
) -> Optional[EvolutionRun]:
    """Committed part of a stored run, or None when nothing was committed."""
    stored = load_run(run_dir)
    if not config.resumable_from(stored.config):
        raise EvolutionError(
            f"cannot resume {run_dir}: configuration differs from the stored run "
            f"(only rounds may be increased)"
        )
    if stored.dataset_digest != digest:
        raise EvolutionError(f"cannot resume {run_dir}: training data differs from the stored run")
    committed = stored.completed_rounds
    if committed < 0:
        return None
    kept = [c for c in stored.candidates if c.round <= committed]
    dropped = len(stored.candidates) - len(kept)
    if dropped:
        logger.warning(f"Discarded {dropped} candidates of uncommitted round {committed + 1}")
    run = stored.model_copy(
        update={"config": config, "candidates": kept, "finished": None}
    )
    persist_run(run, run_dir)
    logger.info(f"Resuming {run_dir} after round {committed} with {len(kept)} candidates")
    return run


def _seed(
    config: EvolutionConfig, train: Dataset, digest: str, run_dir: Path, arrays, quality
) -> EvolutionRun:
    run = EvolutionRun(
        config=config,
        dataset_name=train.name,
        dataset_digest=digest,
        started=datetime.now(timezone.utc),
    )
    persist_run(run, run_dir)

    evaluation = evaluate_candidate(
        config.seed_source,
        train,
        config.fitness_metric,
        allowed_channels=config.allowed_channels,
        max_features=config.max_features,
        arrays=arrays,
        quality=quality,
    )
    if evaluation.failed:
        raise EvolutionError(
            f"seed program '{config.seed_source}' failed: {evaluation.failure_reason}"
        )
    seed = Candidate(id=0, round=0, proposer=SEED_PROPOSER, **evaluation.model_dump())
    point = BestPoint(round=0, best_fitness=seed.fitness, best_candidate_id=0)
    append_round(run_dir, [seed], point)
    run.candidates.append(seed)
    run.best_trajectory.append(point)
    logger.info(f"Seeded pool with '{seed.source}', fitness {seed.fitness:.4f}")
    return run


async def run_evolution_async(
    config: EvolutionConfig,
    train: Dataset,
    client: MutationClient,
    run_dir: PathLike,
    resume: bool = False,
) -> EvolutionRun:
    """
    Run (or resume) an evolutionary search and persist it to ``run_dir``.

    Round 0 evaluates the seed program. Each later round samples parents, prompts the
    client, evaluates the proposals and appends them to the pool; the round is committed
    to disk before the next one starts.

    Args:
        config: search parameters
        train: training dataset, valid for ``config.fitness_metric``
        client: mutation client (HTTP or mock)
        run_dir: run directory, created if needed
        resume: continue the run stored in ``run_dir``

    Returns:
        The finished run

    Raises:
        EvolutionError: unusable training data, failing seed program, resume mismatch
        RunStoreError: ``run_dir`` cannot be written or read
    """
    run_dir = Path(run_dir)
    try:
        check_metric_dataset(config.fitness_metric, train)
    except MetricError as e:
        raise EvolutionError(str(e)) from e

    has_run = (run_dir / CONFIG_FILE).is_file() or (run_dir / CANDIDATES_FILE).is_file()
    if has_run and not resume:
        raise RunStoreError(f"{run_dir} already holds a run; resume it or pick another directory")

    digest = dataset_digest(train)
    arrays = prepare(train)
    quality = quality_array(train)

    run = _restore(config, train, digest, run_dir) if has_run else None
    if run is None:
        run = _seed(config, train, digest, run_dir, arrays, quality)

    workflow = create_round_workflow().compile()
    for round_index in range(run.completed_rounds + 1, config.rounds + 1):
        initial_state: RoundState = {
            "round_index": round_index,
            "config": config,
            "train": train,
            "train_arrays": arrays,
            "quality": quality,
            "client": client,
            "pool": list(run.candidates),
            "parents": [],
            "prompt": None,
            "responses": [],
            "new_candidates": [],
            "next_action": None,
            "error": None,
        }
        final_state = await workflow.ainvoke(initial_state)
        if final_state.get("error"):
            raise EvolutionError(f"round {round_index} failed: {final_state['error']}")

        new_candidates = final_state["new_candidates"]
        run.candidates.extend(new_candidates)
        best = best_of(run.candidates)
        point = BestPoint(round=round_index, best_fitness=best.fitness, best_candidate_id=best.id)
        append_round(run_dir, new_candidates, point)
        run.best_trajectory.append(point)
        failed = sum(1 for c in new_candidates if c.failed)
        logger.info(
            f"Round {round_index}: {len(new_candidates)} new candidates ({failed} failed), "
            f"best fitness {best.fitness:.4f} (candidate {best.id})"
        )

    run.finished = datetime.now(timezone.utc)
    write_config(run, run_dir)
    logger.info(
        f"Evolution finished: {len(run.candidates)} candidates, "
        f"best fitness {run.best_trajectory[-1].best_fitness:.4f}"
    )
    return run


def run_evolution(
    config: EvolutionConfig,
    train: Dataset,
    client: MutationClient,
    run_dir: PathLike,
    resume: bool = False,
) -> EvolutionRun:
    """Blocking wrapper around :func:`run_evolution_async`."""
    return anyio.run(partial(run_evolution_async, config, train, client, run_dir, resume))
