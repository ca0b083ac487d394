"""Baseline and archetype uncertainty estimators.

Every function returns an UNCERTAINTY: higher means the generation is more likely to be
incorrect. Inputs are samples or their precomputed ``SampleArrays``.
"""
import math

import numpy as np

from app.data.arrays import SampleLike, as_arrays
from app.exceptions import EstimatorError
from app.metrics.ranking import safe_correlation


def seq_log_prob_uncertainty(sample: SampleLike) -> float:
    """Negative sum of token log-probabilities (sequence probability baseline)."""
    return float(-np.sum(as_arrays(sample).lp))


_FLOAT_MAX = float(np.finfo(np.float64).max)


def perplexity_uncertainty(sample: SampleLike) -> float:
    """exp of the negative mean token log-probability, saturating at the largest float."""
    with np.errstate(over="ignore"):
        value = float(np.exp(-np.mean(as_arrays(sample).lp)))
    return min(value, _FLOAT_MAX)


def mean_token_entropy(sample: SampleLike) -> float:
    return float(np.mean(as_arrays(sample).ent))


def geometric_weights(n: int, gamma: float) -> np.ndarray:
    """Weights proportional to ``gamma ** (n - 1 - i)``, normalized to sum to 1.

    No range check: callers validate ``gamma`` (the DSL falls back to uniform weights).
    """
    exponents = np.arange(n - 1, -1, -1, dtype=np.float64)
    raw = np.power(float(gamma), exponents)
    return raw / np.sum(raw)


def check_gamma(gamma: float) -> float:
    if not (math.isfinite(gamma) and 0.0 < gamma <= 1.0):
        raise EstimatorError(f"gamma must lie in (0, 1], got {gamma}")
    return float(gamma)


def exp_weights(n: int, gamma: float) -> np.ndarray:
    """Exponential positional weights emphasising late tokens."""
    return geometric_weights(n, check_gamma(gamma))


def linear_weights(n: int) -> np.ndarray:
    """Weights proportional to ``i + 1``, normalized to sum to 1."""
    raw = np.arange(1, n + 1, dtype=np.float64)
    return raw / np.sum(raw)


def exp_weighted_logprob(sample: SampleLike, gamma: float) -> float:
    """Negative exponentially weighted mean log-probability.

    Args:
        sample: sample or its numeric view
        gamma: decay in (0, 1]; 1 gives uniform weights

    Raises:
        EstimatorError: gamma out of range
    """
    arrays = as_arrays(sample)
    return float(-np.dot(exp_weights(arrays.n, gamma), arrays.lp))


def linear_weighted_logprob(sample: SampleLike) -> float:
    """Negative linearly weighted mean log-probability."""
    arrays = as_arrays(sample)
    return float(-np.dot(linear_weights(arrays.n), arrays.lp))


def position_logprob_correlation(sample: SampleLike) -> float:
    """Negated correlation of log-probabilities with token positions.

    Declining log-probabilities score close to +1. Single-token samples and constant
    log-probabilities score 0.
    """
    arrays = as_arrays(sample)
    return -safe_correlation(arrays.lp, arrays.pos)
