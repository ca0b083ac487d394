"""Paired bootstrap difference tests, Bonferroni correction and win/tie/loss tables."""
import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.exceptions import MetricError, StatsError
from app.metrics.fitness import MetricFn, metric_fn
from app.models.dataset import Dataset
from app.models.scores import (
    BootstrapResult,
    ComparisonRow,
    MetricInterval,
    MetricName,
    ScoreVector,
    Verdict,
    WinTieLossSummary,
)

logger = logging.getLogger(__name__)

MIN_RESAMPLES = 1000
# consecutive degenerate draws tolerated for one resample
MAX_REDRAWS = 1000

MetricLike = Union[MetricName, str, Callable[[np.ndarray, np.ndarray], float]]


def _resolve_metric(metric: MetricLike) -> MetricFn:
    if callable(metric):
        return metric
    return metric_fn(metric)


def _aligned(scores: ScoreVector, dataset: Dataset, label: str) -> np.ndarray:
    try:
        return scores.aligned_to(dataset).as_array()
    except MetricError as e:
        raise StatsError(f"scores {label} misaligned: {e}") from e


def _check_resamples(n_resamples: int) -> None:
    if n_resamples < MIN_RESAMPLES:
        raise StatsError(f"n_resamples must be >= {MIN_RESAMPLES}, got {n_resamples}")


def _draw_statistics(
    statistic: Callable[[np.ndarray], float], n: int, n_resamples: int, seed: int
) -> np.ndarray:
    """Statistic on ``n_resamples`` index resamples; degenerate draws are redrawn."""
    rng = np.random.default_rng(seed)
    values = np.empty(n_resamples, dtype=np.float64)
    redrawn = 0
    for b in range(n_resamples):
        for _ in range(MAX_REDRAWS):
            indices = rng.integers(0, n, size=n)
            try:
                values[b] = statistic(indices)
                break
            except MetricError:
                redrawn += 1
        else:
            raise StatsError(
                f"{MAX_REDRAWS} consecutive degenerate resamples; dataset too small or one-sided"
            )
    if redrawn > n_resamples // 10:
        logger.warning(f"Redrew {redrawn} degenerate resamples out of {n_resamples}")
    return values


def _verdict(p_value: float, delta: float, threshold: float) -> Verdict:
    if p_value < threshold and delta > 0:
        return Verdict.WIN
    if p_value < threshold and delta < 0:
        return Verdict.LOSS
    return Verdict.TIE


def paired_bootstrap(
    metric: MetricLike,
    scores_a: ScoreVector,
    scores_b: ScoreVector,
    dataset: Dataset,
    n_resamples: int = settings.bootstrap_resamples,
    alpha: float = settings.bootstrap_alpha,
    seed: int = 0,
) -> BootstrapResult:
    """
    Paired bootstrap test of metric(A) - metric(B).

    Args:
        metric: metric name or ``f(uncertainty, quality)``
        scores_a: uncertainties of method A
        scores_b: uncertainties of method B
        dataset: samples both methods were scored on
        n_resamples: bootstrap resamples (>= 1000)
        alpha: significance level in (0, 1); also sets the percentile interval width
        seed: resampling seed; equal seeds give bit-identical results

    Returns:
        BootstrapResult with two-sided p-value 2 * min(P(d <= 0), P(d >= 0)), each tail
        smoothed as (count + 1) / (n_resamples + 1)
    """
    if not 0.0 < alpha < 1.0:
        raise StatsError(f"alpha must lie in (0, 1), got {alpha}")
    _check_resamples(n_resamples)
    fn = _resolve_metric(metric)
    ua = _aligned(scores_a, dataset, "A")
    ub = _aligned(scores_b, dataset, "B")
    quality = np.array(dataset.qualities, dtype=np.float64)

    delta = fn(ua, quality) - fn(ub, quality)
    deltas = _draw_statistics(
        lambda idx: fn(ua[idx], quality[idx]) - fn(ub[idx], quality[idx]),
        len(quality),
        n_resamples,
        seed,
    )

    low_tail = (np.count_nonzero(deltas <= 0) + 1) / (n_resamples + 1)
    high_tail = (np.count_nonzero(deltas >= 0) + 1) / (n_resamples + 1)
    p_value = min(1.0, 2.0 * min(low_tail, high_tail))
    ci_low, ci_high = np.percentile(deltas, [100 * alpha / 2, 100 * (1 - alpha / 2)])

    result = BootstrapResult(
        delta=float(delta),
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        p_value=float(p_value),
        verdict=_verdict(p_value, delta, alpha),
        n_resamples=n_resamples,
        seed=seed,
        alpha=alpha,
    )
    if result.ci_excludes_delta:
        logger.warning(
            f"Percentile interval [{result.ci_low}, {result.ci_high}] excludes delta {delta}"
        )
    return result


def bootstrap_interval(
    metric: MetricLike,
    scores: ScoreVector,
    dataset: Dataset,
    n_resamples: int = settings.bootstrap_resamples,
    confidence: float = 0.95,
    seed: int = 0,
) -> MetricInterval:
    """Point estimate and percentile bootstrap interval of one method's metric."""
    if not 0.0 < confidence < 1.0:
        raise StatsError(f"confidence must lie in (0, 1), got {confidence}")
    _check_resamples(n_resamples)
    fn = _resolve_metric(metric)
    uncertainty = _aligned(scores, dataset, "")
    quality = np.array(dataset.qualities, dtype=np.float64)
    values = _draw_statistics(
        lambda idx: fn(uncertainty[idx], quality[idx]), len(quality), n_resamples, seed
    )
    tail = 100 * (1 - confidence) / 2
    low, high = np.percentile(values, [tail, 100 - tail])
    return MetricInterval(
        estimate=float(fn(uncertainty, quality)),
        ci_low=float(low),
        ci_high=float(high),
        confidence=confidence,
        n_resamples=n_resamples,
    )


def bonferroni_threshold(m: int, alpha: float) -> float:
    if m < 1:
        raise StatsError("empty family of p-values")
    return alpha / m


def bonferroni(p_values: Sequence[float], alpha: float) -> List[bool]:
    """Reject hypothesis i iff p_i < alpha / m."""
    threshold = bonferroni_threshold(len(p_values), alpha)
    return [p < threshold for p in p_values]


def win_tie_loss(
    results: Sequence[BootstrapResult],
    labels: Sequence[str],
    alpha: Optional[float] = None,
) -> WinTieLossSummary:
    """
    Family-wise verdicts: each result is re-judged at the Bonferroni threshold.

    Args:
        results: one bootstrap comparison per dataset
        labels: dataset names, aligned with ``results``
        alpha: family-wise level; defaults to the level the results were computed at
    """
    if len(results) != len(labels):
        raise StatsError(f"{len(results)} results for {len(labels)} labels: length mismatch")
    if alpha is None:
        alpha = results[0].alpha if results else settings.bootstrap_alpha
    threshold = bonferroni_threshold(len(results), alpha)

    rows = [
        ComparisonRow(
            dataset=label,
            delta=result.delta,
            ci_low=result.ci_low,
            ci_high=result.ci_high,
            p=result.p_value,
            verdict=_verdict(result.p_value, result.delta, threshold),
        )
        for result, label in zip(results, labels)
    ]
    counts: Tuple[int, int, int] = tuple(
        sum(1 for row in rows if row.verdict == verdict)
        for verdict in (Verdict.WIN, Verdict.TIE, Verdict.LOSS)
    )
    return WinTieLossSummary(
        wins=counts[0],
        ties=counts[1],
        losses=counts[2],
        alpha=alpha,
        threshold=threshold,
        rows=rows,
    )
