"""Candidate evaluation and post-hoc analyses of a run's pool."""
import hashlib
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.data.arrays import SampleArrays, prepare, quality_array
from app.dsl.complexity import complexity, lint_feature_count
from app.dsl.program import parse
from app.exceptions import DSLError, EvolutionError, UQEvoError
from app.metrics.fitness import metric_fn
from app.models.dataset import Dataset
from app.models.evolution import Evaluation, EvolutionRun, ValidationRow
from app.models.scores import MetricName

logger = logging.getLogger(__name__)


def score_digest(scores: np.ndarray) -> str:
    """SHA-256 of a score vector's little-endian float64 bytes."""
    data = np.ascontiguousarray(scores, dtype="<f8")
    return hashlib.sha256(data.tobytes()).hexdigest()


def evaluate_candidate(
    source: str,
    train: Dataset,
    metric: MetricName,
    allowed_channels: Optional[Sequence[str]] = None,
    max_features: Optional[int] = None,
    arrays: Optional[List[SampleArrays]] = None,
    quality: Optional[np.ndarray] = None,
) -> Evaluation:
    """
    Parse, check and score ``source`` on ``train``.

    Never raises: every failure becomes an Evaluation with ``failure_reason`` set and the
    stripped raw source. Valid candidates carry their canonical source.

    Args:
        source: proposed program text
        train: training dataset (valid for ``metric``)
        metric: fitness metric
        allowed_channels: channels candidates may read; None allows all
        max_features: limit for the distinct-feature lint, if any
        arrays: precomputed numeric views of ``train``
        quality: precomputed quality array of ``train``
    """
    raw = source.strip()
    try:
        program = parse(raw)
    except DSLError as e:
        return Evaluation(source=raw, failure_reason=str(e))

    canonical = program.canonical
    if allowed_channels is not None:
        forbidden = sorted(program.channels - set(allowed_channels))
        if forbidden:
            return Evaluation(
                source=canonical,
                failure_reason=f"channel not available: {', '.join(forbidden)}",
            )

    arrays = prepare(train) if arrays is None else arrays
    quality = quality_array(train) if quality is None else quality
    try:
        scores = np.array([program.evaluate(a) for a in arrays], dtype=np.float64)
        fitness = float(metric_fn(metric)(scores, quality))
    except UQEvoError as e:
        return Evaluation(source=canonical, failure_reason=str(e))
    except Exception as e:
        logger.error(f"Unexpected failure evaluating '{canonical}': {e!r}")
        return Evaluation(source=canonical, failure_reason=f"internal error: {e!r}")

    return Evaluation(
        source=canonical,
        fitness=fitness,
        complexity=complexity(program),
        lint=lint_feature_count(program, max_features) if max_features else [],
        score_digest=score_digest(scores),
    )


def count_semantic_duplicates(run: EvolutionRun) -> int:
    """Valid candidates whose training scores equal those of an earlier candidate."""
    seen = set()
    duplicates = 0
    for candidate in run.valid_candidates:
        if candidate.score_digest is None:
            continue
        if candidate.score_digest in seen:
            duplicates += 1
        seen.add(candidate.score_digest)
    return duplicates


def rank_by_validation(
    run: EvolutionRun, validation: Dataset, metric: MetricName, top_k: int
) -> List[ValidationRow]:
    """
    Rank the run's valid candidates by ``metric`` on ``validation``.

    Candidates that cannot be scored on the validation data are skipped. Ties go to the
    higher training fitness, then to the older candidate.
    """
    if top_k < 1:
        raise EvolutionError(f"top_k must be >= 1, got {top_k}")
    arrays = prepare(validation)
    quality = quality_array(validation)
    scored: Dict[int, float] = {}
    for candidate in run.valid_candidates:
        result = evaluate_candidate(
            candidate.source, validation, metric, arrays=arrays, quality=quality
        )
        if result.failed:
            logger.warning(
                f"Candidate {candidate.id} skipped on '{validation.name}': "
                f"{result.failure_reason}"
            )
            continue
        scored[candidate.id] = result.fitness

    by_id = {c.id: c for c in run.candidates}
    order = sorted(scored, key=lambda i: (-scored[i], -by_id[i].fitness, i))[:top_k]
    return [
        ValidationRow(
            rank=rank,
            candidate_id=i,
            round=by_id[i].round,
            source=by_id[i].source,
            train_fitness=by_id[i].fitness,
            validation_score=scored[i],
        )
        for rank, i in enumerate(order, start=1)
    ]
