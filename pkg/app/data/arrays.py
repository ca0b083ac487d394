"""Numeric views of samples used by estimators and the DSL evaluator."""
from dataclasses import dataclass, field
from typing import Dict, List, Union

import numpy as np

from app.models.dataset import Dataset, SequenceSample


@dataclass(frozen=True)
class SampleArrays:
    """Read-only float64 arrays for one sample.

    ``channels`` holds only channels present at every token.
    """

    lp: np.ndarray
    ent: np.ndarray
    pos: np.ndarray
    channels: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.lp.shape[0])

    @classmethod
    def from_sample(cls, sample: SequenceSample) -> "SampleArrays":
        lp = np.array(sample.logprobs, dtype=np.float64)
        ent = np.array(sample.entropies, dtype=np.float64)
        pos = np.arange(lp.shape[0], dtype=np.float64)
        channels = {
            name: np.array([token.channels[name] for token in sample.tokens], dtype=np.float64)
            for name in sorted(sample.channel_names())
        }
        for array in (lp, ent, pos, *channels.values()):
            array.setflags(write=False)
        return cls(lp=lp, ent=ent, pos=pos, channels=channels)


SampleLike = Union[SequenceSample, SampleArrays]


def as_arrays(sample: SampleLike) -> SampleArrays:
    """Return the numeric view of ``sample``, building it if needed."""
    if isinstance(sample, SampleArrays):
        return sample
    return SampleArrays.from_sample(sample)


def prepare(dataset: Dataset) -> List[SampleArrays]:
    """Numeric views for every sample, in dataset order."""
    return [SampleArrays.from_sample(sample) for sample in dataset.samples]


def quality_array(dataset: Dataset) -> np.ndarray:
    return np.array(dataset.qualities, dtype=np.float64)
