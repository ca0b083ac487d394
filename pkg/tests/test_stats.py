"""Tests for paired bootstrap comparisons and family-wise verdict tables."""
import numpy as np
import pytest

from app.exceptions import StatsError
from app.models.scores import BootstrapResult, ScoreVector, Verdict
from app.stats.bootstrap import (
    bonferroni,
    bonferroni_threshold,
    bootstrap_interval,
    paired_bootstrap,
    win_tie_loss,
)
from tests.conftest import make_dataset, random_samples


@pytest.fixture(scope="module")
def comparison():
    """Dataset plus a near-perfect detector and a random one."""
    rng = np.random.default_rng(0)
    dataset = make_dataset(random_samples(rng, 200), name="cmp")
    quality = np.array(dataset.qualities)
    good = ScoreVector.from_array(dataset.ids, 1.0 - quality + 0.1 * rng.normal(size=200))
    noise = ScoreVector.from_array(dataset.ids, rng.normal(size=200))
    return dataset, good, noise


def _result(delta, p):
    return BootstrapResult(
        delta=delta,
        ci_low=delta - 0.1,
        ci_high=delta + 0.1,
        p_value=p,
        verdict=Verdict.TIE,
        n_resamples=1000,
        seed=0,
        alpha=0.05,
    )


def test_identical_methods_tie(comparison):
    """Comparing a method with itself gives delta 0, p = 1 and a tie."""
    dataset, good, _ = comparison
    result = paired_bootstrap("roc_auc", good, good, dataset, n_resamples=1000)
    assert result.delta == 0.0
    assert result.p_value == 1.0
    assert result.verdict == Verdict.TIE
    assert result.ci_low == result.ci_high == 0.0


def test_strong_method_wins(comparison):
    """A near-perfect detector beats random scores."""
    dataset, good, noise = comparison
    result = paired_bootstrap("roc_auc", good, noise, dataset, n_resamples=1000, seed=3)
    assert result.delta > 0.3
    assert result.p_value < 0.01
    assert result.verdict == Verdict.WIN
    assert result.ci_low > 0


def test_bootstrap_detects_auc_gap_reliably():
    """AUC 0.9 against 0.5 on 400 samples wins in at least 95 of 100 seeded trials."""
    dataset = make_dataset(random_samples(np.random.default_rng(20), 400), name="power")
    quality = np.array(dataset.qualities)
    # a shift of sqrt(2) * z(0.9) between classes gives a population AUC of 0.9
    shift = np.sqrt(2.0) * 1.2816
    wins, deltas = 0, []
    for trial in range(100):
        rng = np.random.default_rng(1000 + trial)
        strong = (1.0 - quality) * shift + rng.normal(size=400)
        chance = rng.normal(size=400)
        a = ScoreVector.from_array(dataset.ids, strong)
        b = ScoreVector.from_array(dataset.ids, chance)
        result = paired_bootstrap("roc_auc", a, b, dataset, n_resamples=1000, seed=trial)
        wins += result.verdict == Verdict.WIN
        deltas.append(result.delta)
    assert wins >= 95
    assert 0.3 < np.mean(deltas) < 0.5


def test_swapping_methods_mirrors_result(comparison):
    """Swapping A and B negates delta and keeps the p-value."""
    dataset, good, noise = comparison
    forward = paired_bootstrap("prr", good, noise, dataset, n_resamples=1000, seed=5)
    backward = paired_bootstrap("prr", noise, good, dataset, n_resamples=1000, seed=5)
    assert backward.delta == pytest.approx(-forward.delta)
    assert backward.p_value == forward.p_value
    assert backward.verdict == Verdict.LOSS


def test_bootstrap_is_seeded(comparison):
    """Equal seeds give identical results."""
    dataset, good, noise = comparison
    first = paired_bootstrap("roc_auc", good, noise, dataset, n_resamples=1000, seed=7)
    second = paired_bootstrap("roc_auc", good, noise, dataset, n_resamples=1000, seed=7)
    assert first == second


def test_bootstrap_argument_checks(comparison):
    """Too few resamples, a bad alpha or misaligned scores are rejected."""
    dataset, good, noise = comparison
    with pytest.raises(StatsError, match="n_resamples"):
        paired_bootstrap("roc_auc", good, noise, dataset, n_resamples=10)
    with pytest.raises(StatsError, match="alpha"):
        paired_bootstrap("roc_auc", good, noise, dataset, n_resamples=1000, alpha=1.5)
    short = ScoreVector(ids=("s0",), scores=(1.0,))
    with pytest.raises(StatsError, match="misaligned"):
        paired_bootstrap("roc_auc", short, noise, dataset, n_resamples=1000)


def test_bootstrap_interval(comparison):
    """The interval brackets the point estimate for a stable detector."""
    dataset, good, _ = comparison
    interval = bootstrap_interval("roc_auc", good, dataset, n_resamples=1000, seed=1)
    assert interval.ci_low <= interval.estimate <= interval.ci_high
    assert interval.confidence == 0.95
    with pytest.raises(StatsError, match="confidence"):
        bootstrap_interval("roc_auc", good, dataset, n_resamples=1000, confidence=1.0)


def test_bonferroni():
    """Hypothesis i is rejected iff p_i < alpha / m."""
    assert bonferroni_threshold(9, 0.05) == pytest.approx(0.05 / 9)
    assert bonferroni([0.001, 0.01, 0.04], 0.05) == [True, True, False]
    with pytest.raises(StatsError, match="empty family"):
        bonferroni([], 0.05)


def test_win_tie_loss_uses_family_threshold():
    """A result significant on its own can be a tie after correction."""
    results = [_result(0.1, 0.001), _result(-0.1, 0.01), _result(0.2, 0.03)]
    summary = win_tie_loss(results, ["d1", "d2", "d3"])
    assert (summary.wins, summary.ties, summary.losses) == (1, 1, 1)
    assert summary.threshold == pytest.approx(0.05 / 3)
    assert [row.verdict for row in summary.rows] == [Verdict.WIN, Verdict.LOSS, Verdict.TIE]


def test_win_tie_loss_csv():
    """Rows serialize with an optional digest column."""
    summary = win_tie_loss([_result(0.1, 0.001)], ["d1"])
    lines = summary.to_csv().splitlines()
    assert lines[0] == "dataset,delta,ci_low,ci_high,p,verdict"
    assert lines[1].startswith("d1,0.1,")
    assert lines[1].endswith(",win")
    with_digest = summary.to_csv({"d1": "abc"}).splitlines()
    assert with_digest[0].endswith(",dataset_digest")
    assert with_digest[1].endswith(",win,abc")


def test_win_tie_loss_length_mismatch():
    """Every result needs a label."""
    with pytest.raises(StatsError, match="length mismatch"):
        win_tie_loss([_result(0.1, 0.001)], ["d1", "d2"])
