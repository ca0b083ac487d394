"""Rank statistics: ROC-AUC (Mann-Whitney), Pearson and Spearman correlation.

Orientation convention: scores are *uncertainties*. The positive class of ROC-AUC is the
incorrect claim (quality 0), so a good detector assigns higher uncertainty to incorrect
claims and reaches AUC close to 1.
"""
import math
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from app.exceptions import MetricError
from app.models.dataset import Dataset, TaskType
from app.models.scores import ScoreVector


def correlation_or_none(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Product-moment correlation, or None when it is undefined."""
    if x.shape[0] < 2 or x.shape[0] != y.shape[0]:
        return None
    xm = x - np.mean(x)
    ym = y - np.mean(y)
    sxx = float(np.dot(xm, xm))
    syy = float(np.dot(ym, ym))
    if sxx == 0.0 or syy == 0.0:
        return None
    denominator = math.sqrt(sxx * syy)
    if denominator == 0.0 or not math.isfinite(denominator):
        return None
    r = float(np.dot(xm, ym)) / denominator
    if not math.isfinite(r):
        return None
    return min(1.0, max(-1.0, r))


def safe_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Correlation with the total convention: 0 when undefined."""
    r = correlation_or_none(x, y)
    return 0.0 if r is None else r


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson product-moment correlation; raises on zero variance."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape:
        raise MetricError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < 2:
        raise MetricError("pearson needs at least 2 points")
    r = correlation_or_none(xa, ya)
    if r is None:
        raise MetricError("zero variance")
    return r


def spearman_arrays(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation of mid-ranks."""
    return pearson(rankdata(a, method="average"), rankdata(b, method="average"))


def spearman(a: ScoreVector, b: ScoreVector) -> float:
    """Spearman rank correlation of two aligned score vectors."""
    if a.ids != b.ids:
        raise MetricError("score vectors are not aligned")
    if len(a) < 2:
        raise MetricError("spearman needs at least 2 points")
    try:
        return spearman_arrays(a.as_array(), b.as_array())
    except MetricError as e:
        raise MetricError(f"zero rank variance: {e}") from e


def roc_auc_score(uncertainty: np.ndarray, quality: np.ndarray) -> float:
    """
    Mann-Whitney ROC-AUC with incorrect claims (quality 0) as the positive class.

    Equals P(u_incorrect > u_correct) + 0.5 * P(tie), computed from mid-ranks.
    """
    uncertainty = np.asarray(uncertainty, dtype=np.float64)
    quality = np.asarray(quality, dtype=np.float64)
    if uncertainty.shape != quality.shape:
        raise MetricError("uncertainty and quality lengths differ")
    incorrect = quality == 0.0
    n_incorrect = int(np.count_nonzero(incorrect))
    n_correct = int(quality.shape[0]) - n_incorrect
    if n_incorrect == 0 or n_correct == 0:
        raise MetricError("ROC-AUC needs both classes")
    ranks = rankdata(uncertainty, method="average")
    rank_sum = float(np.sum(ranks[incorrect]))
    u_statistic = rank_sum - n_incorrect * (n_incorrect + 1) / 2.0
    return u_statistic / (n_incorrect * n_correct)


def roc_auc(scores: ScoreVector, dataset: Dataset) -> float:
    """ROC-AUC of ``scores`` against a binary dataset."""
    if dataset.task != TaskType.BINARY:
        raise MetricError("ROC-AUC needs a binary dataset")
    aligned = scores.aligned_to(dataset)
    return roc_auc_score(aligned.as_array(), np.array(dataset.qualities))
