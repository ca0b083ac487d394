"""Softmax (Boltzmann) parent selection over the candidate pool."""
import logging
import math
from typing import List, Sequence

import numpy as np

from app.exceptions import EvolutionError
from app.models.evolution import Candidate

logger = logging.getLogger(__name__)

# Purposes of the per-round random substreams.
PARENT_STREAM = 0
PROPOSAL_STREAM = 1


def round_rng(seed: int, round_index: int, purpose: int) -> np.random.Generator:
    """Independent generator for one (round, purpose) pair of a run."""
    return np.random.default_rng([seed, round_index, purpose])


def softmax_weights(fitness: np.ndarray, t: float) -> np.ndarray:
    """Normalized ``exp(fitness / t)``, shifted by the maximum for stability."""
    logits = fitness / t
    weights = np.exp(logits - np.max(logits))
    return weights / np.sum(weights)


def preselect(valid: Sequence[Candidate], top_percent: float) -> List[Candidate]:
    """The ``ceil(top_percent / 100 * len(valid))`` fittest candidates, older first on ties."""
    keep = max(1, math.ceil(top_percent / 100.0 * len(valid)))
    ranked = sorted(valid, key=lambda c: (-c.fitness, c.id))
    return ranked[:keep]


def sample_parents(
    pool: Sequence[Candidate],
    k: int,
    top_percent: float,
    t: float,
    rng: np.random.Generator,
) -> List[Candidate]:
    """
    Draw ``k`` distinct parents with probability proportional to ``exp(fitness / t)``.

    Failed candidates are never eligible. After each draw the remaining weights are
    renormalized; when fewer than ``k`` candidates survive preselection all of them are
    returned in draw order.

    Args:
        pool: candidate pool (failed entries allowed)
        k: number of parents wanted (>= 1)
        top_percent: preselection percentage in (0, 100]
        t: sampling temperature (> 0)
        rng: seeded generator

    Returns:
        Parents in the order they were drawn

    Raises:
        EvolutionError: no valid candidate, or invalid k, top_percent or t
    """
    if k < 1:
        raise EvolutionError(f"k must be >= 1, got {k}")
    if not t > 0.0:
        raise EvolutionError(f"sampling temperature must be > 0, got {t}")
    if not 0.0 < top_percent <= 100.0:
        raise EvolutionError(f"top_percent must lie in (0, 100], got {top_percent}")
    valid = [c for c in pool if not c.failed]
    if not valid:
        raise EvolutionError("no valid candidate in the pool to sample parents from")

    remaining = preselect(valid, top_percent)
    chosen: List[Candidate] = []
    while remaining and len(chosen) < k:
        fitness = np.array([c.fitness for c in remaining], dtype=np.float64)
        index = int(rng.choice(len(remaining), p=softmax_weights(fitness, t)))
        chosen.append(remaining.pop(index))
    return chosen
