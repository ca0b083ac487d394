"""Frozen, versioned catalog of sequence-level features.

Linear estimators, the synthetic generator and logistic regression all read features
through this catalog. Order and names are part of the on-disk contract: linear weights
are only meaningful for the catalog version they were fitted on.
"""
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.data.arrays import SampleArrays, SampleLike, as_arrays
from app.estimators.baselines import (
    exp_weighted_logprob,
    linear_weighted_logprob,
    perplexity_uncertainty,
    position_logprob_correlation,
)
from app.exceptions import EstimatorError
from app.metrics.ranking import safe_correlation
from app.models.dataset import Dataset

CATALOG_VERSION = 1

LOW_LOGPROB_THRESHOLD = -2.0

FeatureFn = Callable[[SampleArrays], float]

_CATALOG: Tuple[Tuple[str, FeatureFn], ...] = (
    ("mean_logprob", lambda a: float(np.mean(a.lp))),
    ("min_logprob", lambda a: float(np.min(a.lp))),
    ("max_logprob", lambda a: float(np.max(a.lp))),
    ("std_logprob", lambda a: float(np.std(a.lp))),
    ("first_logprob", lambda a: float(a.lp[0])),
    ("last_logprob", lambda a: float(a.lp[-1])),
    ("sum_logprob", lambda a: float(np.sum(a.lp))),
    ("mean_entropy", lambda a: float(np.mean(a.ent))),
    ("max_entropy", lambda a: float(np.max(a.ent))),
    ("min_entropy", lambda a: float(np.min(a.ent))),
    ("std_entropy", lambda a: float(np.std(a.ent))),
    ("last_entropy", lambda a: float(a.ent[-1])),
    ("length", lambda a: float(a.n)),
    ("exp_weighted_0_5", lambda a: exp_weighted_logprob(a, 0.5)),
    ("exp_weighted_0_8", lambda a: exp_weighted_logprob(a, 0.8)),
    ("lin_weighted", linear_weighted_logprob),
    ("pos_corr", position_logprob_correlation),
    ("frac_low_logprob", lambda a: float(np.mean(a.lp < LOW_LOGPROB_THRESHOLD))),
    ("perplexity", perplexity_uncertainty),
    ("entropy_logprob_corr", lambda a: safe_correlation(a.ent, a.lp)),
)

FEATURE_NAMES: Tuple[str, ...] = tuple(name for name, _ in _CATALOG)
FEATURES: Dict[str, FeatureFn] = dict(_CATALOG)


class FeatureVector(BaseModel):
    """Ordered (name, value) pairs of sequence-level features."""

    model_config = ConfigDict(frozen=True)

    names: Tuple[str, ...]
    values: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_vector(self) -> "FeatureVector":
        if len(self.names) != len(self.values):
            raise ValueError("names and values differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")
        return self

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)


def check_feature_names(names: Iterable[str]) -> List[str]:
    """Return ``names`` as a list, raising on any name missing from the catalog."""
    names = list(names)
    unknown = [name for name in names if name not in FEATURES]
    if unknown:
        raise EstimatorError(
            f"unknown feature(s) {unknown}; catalog v{CATALOG_VERSION} has {list(FEATURE_NAMES)}"
        )
    return names


def extract_features(
    sample: SampleLike, names: Optional[Sequence[str]] = None
) -> FeatureVector:
    """Evaluate the catalog (or the named subset, in the given order) on one sample."""
    selected = FEATURE_NAMES if names is None else tuple(check_feature_names(names))
    arrays = as_arrays(sample)
    values = tuple(FEATURES[name](arrays) for name in selected)
    try:
        return FeatureVector(names=selected, values=values)
    except ValueError as e:
        raise EstimatorError(f"feature extraction failed: {e}") from e


def feature_matrix(
    dataset: Dataset, names: Optional[Sequence[str]] = None
) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Feature names and the (samples x features) matrix for ``dataset``."""
    selected = FEATURE_NAMES if names is None else tuple(check_feature_names(names))
    rows = [extract_features(sample, selected).values for sample in dataset.samples]
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), len(selected))
    return selected, matrix
