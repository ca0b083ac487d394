"""Dataset data model: per-token features, labelled generations, datasets."""
import math
from enum import Enum
from typing import Dict, FrozenSet, List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TaskType(str, Enum):
    """Kind of ground-truth quality carried by a dataset."""

    BINARY = "binary"
    CONTINUOUS = "continuous"


class TokenFeatures(BaseModel):
    """Precomputed signals for one emitted token.

    Built and serialized with the short JSONL keys ``lp``, ``ent`` and ``ch`` only.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    logprob: float = Field(alias="lp")
    entropy: float = Field(alias="ent")
    channels: Dict[str, float] = Field(default_factory=dict, alias="ch")

    @field_validator("logprob")
    @classmethod
    def _check_logprob(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("logprob must be finite")
        if value > 0:
            raise ValueError("logprob must be <= 0")
        return value

    @field_validator("entropy")
    @classmethod
    def _check_entropy(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("entropy must be finite")
        if value < 0:
            raise ValueError("entropy must be >= 0")
        return value

    @field_validator("channels")
    @classmethod
    def _check_channels(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, channel_value in value.items():
            if not math.isfinite(channel_value):
                raise ValueError(f"channel '{name}' must be finite")
        return value


class SequenceSample(BaseModel):
    """One model generation with its ground-truth quality."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    tokens: List[TokenFeatures] = Field(min_length=1)
    quality: float
    meta: Dict[str, str] = Field(default_factory=dict)

    @field_validator("quality")
    @classmethod
    def _check_quality(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("quality must be finite")
        if not 0.0 <= value <= 1.0:
            raise ValueError("quality must lie in [0, 1]")
        return value

    @property
    def logprobs(self) -> List[float]:
        return [token.logprob for token in self.tokens]

    @property
    def entropies(self) -> List[float]:
        return [token.entropy for token in self.tokens]

    def channel_names(self) -> FrozenSet[str]:
        """Channels carried by every token of the sample."""
        names = set(self.tokens[0].channels)
        for token in self.tokens[1:]:
            names &= set(token.channels)
        return frozenset(names)


class Dataset(BaseModel):
    """An immutable, validated collection of samples."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    task: TaskType
    samples: List[SequenceSample]
    required_channels: FrozenSet[str] = Field(default_factory=frozenset)

    @model_validator(mode="after")
    def _check_dataset(self) -> "Dataset":
        seen = set()
        for sample in self.samples:
            if sample.id in seen:
                raise ValueError(f"duplicate sample id '{sample.id}'")
            seen.add(sample.id)
            missing = self.required_channels - sample.channel_names()
            if missing:
                raise ValueError(
                    f"sample '{sample.id}' lacks required channels {sorted(missing)}"
                )
        if self.task == TaskType.BINARY:
            qualities = {sample.quality for sample in self.samples}
            if not qualities <= {0.0, 1.0}:
                raise ValueError("quality not in {0,1}")
            if qualities != {0.0, 1.0}:
                raise ValueError("binary dataset has a single class")
        return self

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def ids(self) -> List[str]:
        return [sample.id for sample in self.samples]

    @property
    def qualities(self) -> List[float]:
        return [sample.quality for sample in self.samples]
