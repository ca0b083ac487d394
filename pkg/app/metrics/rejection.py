"""Rejection curves and the prediction-rejection ratio (PRR).

Samples are rejected most-uncertain first. Samples sharing an uncertainty value are
treated as one group: when a rejection count cuts through a group, the retained part
contributes the group's mean quality, which equals averaging over every ordering of the
tie. Constant uncertainty therefore yields a flat curve and a PRR of exactly 0.
"""
import logging

import numpy as np

from app.exceptions import MetricError
from app.models.dataset import Dataset
from app.models.scores import RejectionCurve, ScoreVector

logger = logging.getLogger(__name__)

DEFAULT_MAX_REJECTION = 0.5


def _retained_means(uncertainty: np.ndarray, quality: np.ndarray, last_k: int) -> np.ndarray:
    """Mean retained quality after rejecting k = 0..last_k samples."""
    n = quality.shape[0]
    order = np.argsort(uncertainty, kind="stable")
    u_sorted = uncertainty[order]
    q_sorted = quality[order]

    starts = np.flatnonzero(np.r_[True, u_sorted[1:] != u_sorted[:-1]])
    sizes = np.diff(np.r_[starts, n])
    cumulative = np.r_[0.0, np.cumsum(q_sorted)]
    if starts.shape[0] == 1:
        # one tie group: the stable sort kept dataset order
        group_means = np.array([np.mean(quality)])
    else:
        group_means = np.add.reduceat(q_sorted, starts) / sizes

    retained = n - np.arange(last_k + 1)
    # group holding the last retained sample; it may be cut by the rejection boundary
    boundary = np.searchsorted(starts, retained - 1, side="right") - 1
    head = starts[boundary]
    values = cumulative[head] / retained + ((retained - head) / retained) * group_means[boundary]
    values[0] = float(np.mean(quality))
    return values


def _check_inputs(uncertainty: np.ndarray, quality: np.ndarray) -> None:
    if uncertainty.shape != quality.shape:
        raise MetricError("uncertainty and quality lengths differ")
    if quality.shape[0] == 0:
        raise MetricError("empty dataset")


def rejection_curve_arrays(uncertainty: np.ndarray, quality: np.ndarray) -> np.ndarray:
    """Retained mean quality for every rejection count 0..N-1."""
    uncertainty = np.asarray(uncertainty, dtype=np.float64)
    quality = np.asarray(quality, dtype=np.float64)
    _check_inputs(uncertainty, quality)
    return _retained_means(uncertainty, quality, quality.shape[0] - 1)


def _as_curve(values: np.ndarray) -> RejectionCurve:
    n = values.shape[0]
    return RejectionCurve(
        fractions=tuple(k / n for k in range(n)),
        mean_quality=tuple(float(v) for v in values),
    )


def rejection_curve(uncertainty: ScoreVector, dataset: Dataset) -> RejectionCurve:
    """Rejection curve of ``uncertainty`` over ``dataset`` at fractions k/N."""
    if len(dataset) == 0:
        raise MetricError("empty dataset")
    aligned = uncertainty.aligned_to(dataset)
    quality = np.array(dataset.qualities, dtype=np.float64)
    return _as_curve(rejection_curve_arrays(aligned.as_array(), quality))


def ideal_rejection_curve(dataset: Dataset) -> RejectionCurve:
    """Oracle curve: samples rejected in order of increasing true quality."""
    if len(dataset) == 0:
        raise MetricError("empty dataset")
    quality = np.array(dataset.qualities, dtype=np.float64)
    return _as_curve(rejection_curve_arrays(-quality, quality))


def _area_above_mean(values: np.ndarray, mean: float, n: int) -> float:
    gaps = values - mean
    return float(np.sum((gaps[1:] + gaps[:-1]) * 0.5) / n)


def prr_score(
    uncertainty: np.ndarray,
    quality: np.ndarray,
    max_rejection: float = DEFAULT_MAX_REJECTION,
) -> float:
    """
    Prediction-rejection ratio over rejection fractions [0, max_rejection].

    Args:
        uncertainty: per-sample uncertainty, higher means more likely wrong
        quality: per-sample ground-truth quality in [0, 1]
        max_rejection: upper end of the integrated rejection range

    Returns:
        (area between method and random curves) / (area between ideal and random curves);
        0 for chance, 1 for the ideal ordering

    Raises:
        MetricError: bad max_rejection, empty input, or all-equal quality
    """
    if not 0.0 < max_rejection <= 1.0:
        raise MetricError(f"max_rejection must lie in (0, 1], got {max_rejection}")
    uncertainty = np.asarray(uncertainty, dtype=np.float64)
    quality = np.asarray(quality, dtype=np.float64)
    _check_inputs(uncertainty, quality)

    n = quality.shape[0]
    last_k = min(int(np.floor(max_rejection * n)), n - 1)
    if last_k < 1 or np.all(quality == quality[0]):
        raise MetricError("degenerate ideal curve")

    mean = float(np.mean(quality))
    ideal_area = _area_above_mean(_retained_means(-quality, quality, last_k), mean, n)
    if ideal_area <= 0.0:
        raise MetricError("degenerate ideal curve")
    method_area = _area_above_mean(_retained_means(uncertainty, quality, last_k), mean, n)
    return method_area / ideal_area


def prr(
    uncertainty: ScoreVector,
    dataset: Dataset,
    max_rejection: float = DEFAULT_MAX_REJECTION,
) -> float:
    """PRR of ``uncertainty`` against the dataset's quality values."""
    aligned = uncertainty.aligned_to(dataset)
    return prr_score(
        aligned.as_array(), np.array(dataset.qualities, dtype=np.float64), max_rejection
    )
