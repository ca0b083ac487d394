"""Score vectors, rejection curves and significance-test results."""
import csv
import io
import math
from enum import Enum
from typing import ClassVar, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import MetricError
from app.models.dataset import Dataset


class ScoreVector(BaseModel):
    """Per-sample scores aligned to a dataset."""

    model_config = ConfigDict(frozen=True)

    ids: Tuple[str, ...]
    scores: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_vector(self) -> "ScoreVector":
        if len(self.ids) != len(self.scores):
            raise ValueError("ids and scores differ in length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ids in score vector")
        if not all(math.isfinite(score) for score in self.scores):
            raise ValueError("scores must be finite")
        return self

    @classmethod
    def from_array(cls, ids, scores: np.ndarray) -> "ScoreVector":
        return cls(ids=tuple(ids), scores=tuple(float(s) for s in scores))

    def __len__(self) -> int:
        return len(self.scores)

    def as_array(self) -> np.ndarray:
        return np.array(self.scores, dtype=np.float64)

    def aligned_to(self, dataset: Dataset) -> "ScoreVector":
        """Reorder to dataset order; ids must match the dataset one-to-one."""
        if list(self.ids) == dataset.ids:
            return self
        if set(self.ids) != set(dataset.ids) or len(self.ids) != len(dataset):
            raise MetricError(f"score vector ids do not match dataset '{dataset.name}'")
        lookup = dict(zip(self.ids, self.scores))
        return ScoreVector(
            ids=tuple(dataset.ids), scores=tuple(lookup[i] for i in dataset.ids)
        )


class RejectionCurve(BaseModel):
    """Mean quality of retained samples versus the fraction rejected."""

    model_config = ConfigDict(frozen=True)

    fractions: Tuple[float, ...]
    mean_quality: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_curve(self) -> "RejectionCurve":
        if len(self.fractions) != len(self.mean_quality) or not self.fractions:
            raise ValueError("curve must have matching, non-empty coordinates")
        if self.fractions[0] != 0.0:
            raise ValueError("curve must start at rejection fraction 0")
        if any(b <= a for a, b in zip(self.fractions, self.fractions[1:])):
            raise ValueError("rejection fractions must be strictly increasing")
        return self

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.fractions, self.mean_quality))


class Verdict(str, Enum):
    WIN = "win"
    TIE = "tie"
    LOSS = "loss"


class BootstrapResult(BaseModel):
    """Paired bootstrap comparison of method A against method B."""

    delta: float
    ci_low: float
    ci_high: float
    p_value: float = Field(ge=0.0, le=1.0)
    verdict: Verdict
    n_resamples: int
    seed: int
    alpha: float

    @property
    def ci_excludes_delta(self) -> bool:
        """Percentile intervals may miss the point estimate in pathological cases."""
        return not self.ci_low <= self.delta <= self.ci_high


class MetricInterval(BaseModel):
    """Point estimate of a metric with a percentile bootstrap interval."""

    estimate: float
    ci_low: float
    ci_high: float
    confidence: float
    n_resamples: int


class ComparisonRow(BaseModel):
    dataset: str
    delta: float
    ci_low: float
    ci_high: float
    p: float
    verdict: Verdict


class WinTieLossSummary(BaseModel):
    """Family-wise (Bonferroni) verdict counts with per-dataset rows."""

    wins: int
    ties: int
    losses: int
    alpha: float
    threshold: float
    rows: List[ComparisonRow]

    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        "dataset",
        "delta",
        "ci_low",
        "ci_high",
        "p",
        "verdict",
    )

    def to_csv(self, digests: Optional[Mapping[str, str]] = None) -> str:
        """Per-dataset rows; with ``digests`` a dataset_digest column is appended."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header = list(self.CSV_COLUMNS)
        if digests is not None:
            header.append("dataset_digest")
        writer.writerow(header)
        for row in self.rows:
            values = [row.dataset, repr(row.delta), repr(row.ci_low), repr(row.ci_high),
                      repr(row.p), row.verdict.value]
            if digests is not None:
                values.append(digests[row.dataset])
            writer.writerow(values)
        return buffer.getvalue()


class MetricName(str, Enum):
    """Fitness and evaluation metrics."""

    ROC_AUC = "roc_auc"
    PRR = "prr"
