"""Synthetic datasets with a planted, known-optimal scorer."""
import logging
from typing import Dict, List, Mapping, Sequence

import numpy as np
from scipy.special import expit

from app.data.arrays import SampleArrays
from app.data.store import build_dataset
from app.estimators.catalog import check_feature_names, extract_features
from app.exceptions import DatasetError, EstimatorError
from app.models.dataset import Dataset, SequenceSample, TaskType, TokenFeatures

logger = logging.getLogger(__name__)


def _token_levels(rng: np.random.Generator, length: int) -> np.ndarray:
    """Per-position mean surprisal: a per-sample level with a per-sample drift."""
    level = (0.05 + 5.0 * rng.random()) * (1.0 + 0.1 * np.log(length))
    slope = rng.normal(0.0, 1.0)
    relative = np.linspace(-0.5, 0.5, length) if length > 1 else np.zeros(1)
    return level * np.exp(slope * relative)


def _generate_tokens(
    rng: np.random.Generator, length: int, channels: Sequence[str]
) -> List[TokenFeatures]:
    levels = _token_levels(rng, length)
    logprobs = -rng.gamma(shape=2.0, scale=levels / 2.0)
    entropies = np.abs(logprobs) * np.exp(rng.normal(0.0, 0.25, size=length)) + rng.gamma(
        shape=1.0, scale=0.1, size=length
    )
    extra = {name: rng.normal(0.0, 1.0, size=length) for name in channels}
    return [
        TokenFeatures(
            lp=float(logprobs[i]),
            ent=float(entropies[i]),
            ch={name: float(values[i]) for name, values in extra.items()},
        )
        for i in range(length)
    ]


def generate_synthetic(
    n_samples: int,
    min_len: int,
    max_len: int,
    planted_weights: Mapping[str, float],
    noise: float,
    task: TaskType,
    seed: int,
    channels: Sequence[str] = (),
    name: str = "synthetic",
) -> Dataset:
    """
    Generate a dataset whose quality depends on catalog features through a sigmoid link.

    Args:
        n_samples: number of samples
        min_len: shortest token sequence
        max_len: longest token sequence (lengths are uniform in [min_len, max_len])
        planted_weights: catalog feature name -> weight of the planted linear predictor
        noise: standard deviation of the Gaussian noise added before the link
        task: binary (Bernoulli draw) or continuous (sigmoid value)
        seed: master seed; the dataset is a pure function of all arguments
        channels: names of distractor channels filled with standard normal noise
        name: dataset name

    Returns:
        Dataset with ids ``syn-000000`` ... in generation order

    Raises:
        DatasetError: invalid sizes, unknown feature name, single-class binary outcome
    """
    task = TaskType(task)
    if n_samples < 1 or min_len < 1 or max_len < min_len:
        raise DatasetError(
            f"invalid sizes: n_samples={n_samples}, min_len={min_len}, max_len={max_len}"
        )
    if noise < 0:
        raise DatasetError(f"noise must be >= 0, got {noise}")
    try:
        feature_names = check_feature_names(planted_weights)
    except EstimatorError as e:
        raise DatasetError(f"invalid planted weights: {e}") from e
    weights = np.array([planted_weights[f] for f in feature_names], dtype=np.float64)

    rng = np.random.default_rng(seed)
    lengths = rng.integers(min_len, max_len + 1, size=n_samples)
    token_lists = [_generate_tokens(rng, int(length), channels) for length in lengths]

    features = np.array(
        [
            extract_features(
                SampleArrays(
                    lp=np.array([t.logprob for t in tokens]),
                    ent=np.array([t.entropy for t in tokens]),
                    pos=np.arange(len(tokens), dtype=np.float64),
                ),
                feature_names,
            ).values
            for tokens in token_lists
        ],
        dtype=np.float64,
    ).reshape(n_samples, len(feature_names))
    linear = features @ weights
    # centred so both classes appear at any weight scale; rankings are unchanged
    linear = linear - np.mean(linear)
    probability = expit(linear + rng.normal(0.0, noise, size=n_samples))

    if task == TaskType.BINARY:
        quality = (rng.random(n_samples) < probability).astype(np.float64)
    else:
        quality = np.clip(probability, 0.0, 1.0)

    samples = [
        SequenceSample(id=f"syn-{i:06d}", tokens=tokens, quality=float(quality[i]))
        for i, tokens in enumerate(token_lists)
    ]
    dataset = build_dataset(name, task, samples, frozenset(channels))
    logger.info(
        f"Generated synthetic dataset '{name}': {n_samples} samples, "
        f"planted {dict(planted_weights)}, noise {noise}"
    )
    return dataset


def parse_planted(items: Sequence[str]) -> Dict[str, float]:
    """Parse ``name=weight`` pairs."""
    planted: Dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise DatasetError(f"expected name=weight, got '{item}'")
        try:
            planted[key.strip()] = float(value)
        except ValueError as e:
            raise DatasetError(f"invalid weight in '{item}'") from e
    return planted
