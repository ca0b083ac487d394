"""Tests for ROC-AUC, rejection curves, PRR and rank correlations."""
import numpy as np
import pytest
from scipy.stats import pearsonr, spearmanr

from app.exceptions import MetricError
from app.metrics.fitness import check_metric_dataset, metric_fn
from app.metrics.ranking import pearson, roc_auc, roc_auc_score, safe_correlation, spearman
from app.metrics.rejection import (
    ideal_rejection_curve,
    prr,
    prr_score,
    rejection_curve,
    rejection_curve_arrays,
)
from app.models.dataset import TaskType
from app.models.scores import MetricName, ScoreVector
from tests.conftest import make_dataset, make_sample


def _pairwise_auc(uncertainty, quality):
    wrong = uncertainty[quality == 0]
    right = uncertainty[quality == 1]
    wins = (wrong[:, None] > right[None, :]).sum()
    ties = (wrong[:, None] == right[None, :]).sum()
    return (wins + 0.5 * ties) / (wrong.size * right.size)


def test_auc_matches_pairwise_definition():
    """Mid-rank AUC equals the pairwise count on 200 random instances with ties."""
    rng = np.random.default_rng(0)
    for _ in range(200):
        size = int(rng.integers(2, 40))
        quality = rng.integers(0, 2, size=size).astype(float)
        quality[0], quality[1] = 0.0, 1.0
        uncertainty = rng.integers(0, 6, size=size).astype(float)
        assert roc_auc_score(uncertainty, quality) == pytest.approx(
            _pairwise_auc(uncertainty, quality), abs=1e-12
        )


def test_auc_orientation():
    """Higher uncertainty on incorrect samples gives AUC 1."""
    quality = np.array([1.0, 0.0, 1.0, 0.0])
    assert roc_auc_score(np.array([0.1, 0.9, 0.2, 0.8]), quality) == 1.0
    assert roc_auc_score(np.array([0.9, 0.1, 0.8, 0.2]), quality) == 0.0
    assert roc_auc_score(np.zeros(4), quality) == 0.5


def test_auc_needs_both_classes():
    """A single-class quality vector is an error."""
    with pytest.raises(MetricError, match="both classes"):
        roc_auc_score(np.array([0.1, 0.2]), np.array([1.0, 1.0]))


def _increasing_transforms(rng, count):
    """Strictly increasing maps that keep small distinct integers distinct."""
    transforms = []
    for _ in range(count):
        a, b = rng.uniform(0.5, 3.0), rng.uniform(-5.0, 5.0)
        kind = int(rng.integers(0, 3))
        if kind == 0:
            transforms.append(lambda x, a=a, b=b: a * x + b)
        elif kind == 1:
            transforms.append(lambda x, a=a: np.exp(a * x / 4))
        else:
            transforms.append(lambda x, a=a, b=b: x**3 + a * x + b)
    return transforms


def _instance(rng, binary):
    size = int(rng.integers(4, 51))
    if binary:
        quality = rng.integers(0, 2, size=size).astype(float)
    else:
        quality = rng.integers(0, 11, size=size) / 10
    quality[0], quality[1] = 0.0, 1.0
    uncertainty = rng.integers(0, 8, size=size).astype(float)
    return uncertainty, quality


def test_auc_is_rank_invariant():
    """50 strictly increasing transforms leave AUC exactly unchanged on 100 instances."""
    rng = np.random.default_rng(1)
    for _ in range(100):
        uncertainty, quality = _instance(rng, binary=True)
        base = roc_auc_score(uncertainty, quality)
        for transform in _increasing_transforms(rng, 50):
            assert roc_auc_score(transform(uncertainty), quality) == base


def test_score_vector_alignment(tiny_dataset):
    """Scores given in another order are realigned by id."""
    ids = list(reversed(tiny_dataset.ids))
    values = [-sum(tiny_dataset.samples[tiny_dataset.ids.index(i)].logprobs) for i in ids]
    scores = ScoreVector(ids=tuple(ids), scores=tuple(values))
    assert roc_auc(scores, tiny_dataset) == 1.0
    with pytest.raises(MetricError, match="do not match"):
        roc_auc(ScoreVector(ids=("a",), scores=(1.0,)), tiny_dataset)


def test_prr_ideal_and_constant():
    """The oracle ordering scores 1; constant uncertainty scores exactly 0."""
    quality = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.5, 0.2, 0.9])
    assert prr_score(-quality, quality) == 1.0
    assert prr_score(np.full(8, 3.0), quality) == 0.0
    assert prr_score(quality, quality) < 0


@pytest.mark.parametrize("binary", [True, False])
def test_prr_endpoints_are_exact(binary):
    """On 100 random datasets, anti-ranking gives exactly 1 and constant scores exactly 0."""
    rng = np.random.default_rng(7 if binary else 8)
    for _ in range(100):
        _, quality = _instance(rng, binary)
        assert prr_score(-quality, quality) == 1.0
        assert prr_score(1.0 - quality, quality) == 1.0
        assert prr_score(np.full(quality.shape, rng.normal()), quality) == 0.0


def _reference_curve(uncertainty, quality):
    """Rejection curve by direct averaging over each retained set."""
    n = quality.shape[0]
    values = []
    for k in range(n):
        retained = n - k
        total = 0.0
        for level in np.unique(uncertainty):
            members = quality[uncertainty == level]
            below = int(np.sum(uncertainty < level))
            kept = min(max(retained - below, 0), members.size)
            total += kept * members.mean()
        values.append(total / retained)
    return np.array(values)


def test_rejection_curve_matches_direct_averaging():
    """Cumulative-sum curves equal direct averaging over tie-heavy random data."""
    rng = np.random.default_rng(9)
    for _ in range(50):
        uncertainty, quality = _instance(rng, binary=False)
        curve = rejection_curve_arrays(uncertainty, quality)
        assert np.allclose(curve, _reference_curve(uncertainty, quality), rtol=0, atol=1e-12)
        assert curve[0] == np.mean(quality)


def test_prr_degenerate_cases():
    """Constant quality and bad rejection ranges are errors."""
    with pytest.raises(MetricError, match="degenerate"):
        prr_score(np.array([0.1, 0.2, 0.3]), np.ones(3))
    with pytest.raises(MetricError, match="max_rejection"):
        prr_score(np.array([0.1, 0.2]), np.array([0.0, 1.0]), max_rejection=0.0)
    with pytest.raises(MetricError, match="lengths differ"):
        prr_score(np.array([0.1]), np.array([0.0, 1.0]))


@pytest.mark.parametrize("binary", [True, False])
def test_prr_is_rank_invariant(binary):
    """50 strictly increasing transforms leave PRR exactly unchanged on 100 instances."""
    rng = np.random.default_rng(2 if binary else 3)
    for _ in range(100):
        uncertainty, quality = _instance(rng, binary)
        base = prr_score(uncertainty, quality)
        for transform in _increasing_transforms(rng, 50):
            assert prr_score(transform(uncertainty), quality) == base


def test_prr_scales_to_large_datasets():
    """Distinct uncertainties on a large dataset keep the curve well defined."""
    rng = np.random.default_rng(4)
    quality = rng.uniform(size=20000)
    uncertainty = -quality + rng.normal(scale=0.2, size=20000)
    curve = rejection_curve_arrays(uncertainty, quality)
    assert curve.shape == (20000,)
    assert 0.0 < prr_score(uncertainty, quality) < 1.0


def test_rejection_curve_shape(tiny_dataset):
    """Curves start at the dataset mean and reach the best samples under perfect ordering."""
    ideal = ideal_rejection_curve(tiny_dataset)
    assert ideal.fractions[0] == 0.0
    assert ideal.mean_quality[0] == pytest.approx(0.5)
    assert ideal.mean_quality[3] == 1.0
    assert len(ideal.points) == len(tiny_dataset)

    flat = rejection_curve_arrays(np.zeros(6), np.array(tiny_dataset.qualities))
    assert np.allclose(flat, 0.5)

    scores = ScoreVector(
        ids=tuple(tiny_dataset.ids),
        scores=tuple(-sum(s.logprobs) for s in tiny_dataset.samples),
    )
    curve = rejection_curve(scores, tiny_dataset)
    assert curve.fractions == ideal.fractions
    assert np.allclose(curve.mean_quality, ideal.mean_quality)
    assert prr(scores, tiny_dataset) == pytest.approx(1.0)


def test_safe_correlation_conventions():
    """Undefined correlations are 0 and values are clipped to [-1, 1]."""
    x = np.arange(5, dtype=float)
    assert safe_correlation(x, x) == 1.0
    assert safe_correlation(x, -x) == -1.0
    assert safe_correlation(x, np.ones(5)) == 0.0
    assert safe_correlation(np.array([1.0]), np.array([2.0])) == 0.0


def test_pearson_and_spearman_match_scipy():
    """Correlations agree with scipy on random data with ties."""
    rng = np.random.default_rng(3)
    a = rng.integers(0, 10, size=50).astype(float)
    b = a + rng.normal(size=50)
    ids = tuple(f"s{i}" for i in range(50))
    assert pearson(a, b) == pytest.approx(pearsonr(a, b)[0], abs=1e-12)
    left = ScoreVector(ids=ids, scores=tuple(a))
    right = ScoreVector(ids=ids, scores=tuple(b))
    assert spearman(left, right) == pytest.approx(spearmanr(a, b)[0], abs=1e-12)


def test_spearman_errors():
    """Misaligned or constant vectors cannot be correlated."""
    left = ScoreVector(ids=("a", "b"), scores=(1.0, 2.0))
    with pytest.raises(MetricError, match="not aligned"):
        spearman(left, ScoreVector(ids=("b", "a"), scores=(1.0, 2.0)))
    with pytest.raises(MetricError, match="zero rank variance"):
        spearman(left, ScoreVector(ids=("a", "b"), scores=(1.0, 1.0)))


def test_metric_registry():
    """Metrics are looked up by name and checked against the dataset task."""
    assert metric_fn("roc_auc") is roc_auc_score
    assert metric_fn(MetricName.PRR) is prr_score
    with pytest.raises(MetricError, match="unknown metric"):
        metric_fn("brier")
    continuous = make_dataset(
        [make_sample("a", [-1.0], 0.3), make_sample("b", [-2.0], 0.7)],
        task=TaskType.CONTINUOUS,
    )
    with pytest.raises(MetricError, match="needs a binary dataset"):
        check_metric_dataset("roc_auc", continuous)
    check_metric_dataset("prr", continuous)
