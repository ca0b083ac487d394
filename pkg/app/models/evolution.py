"""Evolution data model: pool candidates, run configuration, run records."""
import math
from datetime import datetime
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.complexity import ComplexityReport
from app.models.scores import MetricName

SEED_SOURCE = "-sum(lp)"
SEED_PROPOSER = "seed"

DEFAULT_TASK = (
    "Design an unsupervised uncertainty score for a language-model generation. The score "
    "must be HIGHER when the generation is more likely to contain a factual error "
    "(hallucination). It is computed from per-token signals of the generating model only."
)


class Candidate(BaseModel):
    """One pool entry. ``fitness`` is None for failed candidates."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    source: str
    fitness: Optional[float] = None
    failure_reason: Optional[str] = None
    parent_ids: List[int] = Field(default_factory=list)
    round: int = Field(ge=0)
    complexity: Optional[ComplexityReport] = None
    proposer: str
    lint: List[str] = Field(default_factory=list)
    score_digest: Optional[str] = None

    @model_validator(mode="after")
    def _check_candidate(self) -> "Candidate":
        if self.fitness is None and not self.failure_reason:
            raise ValueError("failed candidate needs a failure_reason")
        if self.fitness is not None and not math.isfinite(self.fitness):
            raise ValueError("fitness must be finite")
        if any(parent >= self.id for parent in self.parent_ids):
            raise ValueError("parent_ids must reference earlier candidates")
        return self

    @property
    def failed(self) -> bool:
        return self.fitness is None

    def to_program(self):
        """Parse the stored canonical source (valid candidates only)."""
        from app.dsl.program import parse

        return parse(self.source)


class EvolutionConfig(BaseModel):
    """Search parameters; every field is validated at construction."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rounds: int = Field(500, ge=0)
    candidates_per_round: int = Field(2, ge=1)
    parents_min: int = Field(1, ge=1, le=4)
    parents_per_prompt: int = Field(4, ge=1, le=4)
    top_percent: float = Field(100.0, gt=0.0, le=100.0)
    t_cand_sampling: float = Field(0.05, gt=0.0)
    llm_temperature: float = Field(1.0, ge=0.0)
    fitness_metric: MetricName = MetricName.ROC_AUC
    seed: int = Field(0, ge=0, lt=2**64)
    dedup: bool = True
    seed_source: str = SEED_SOURCE
    task_description: str = DEFAULT_TASK
    constraints: List[str] = Field(default_factory=list)
    domain_knowledge: bool = False
    allowed_channels: Optional[List[str]] = None
    max_features: Optional[int] = Field(None, ge=1)
    max_in_flight: int = Field(2, ge=1)

    @model_validator(mode="after")
    def _check_parents(self) -> "EvolutionConfig":
        if self.parents_min > self.parents_per_prompt:
            raise ValueError("parents_min must not exceed parents_per_prompt")
        return self

    def resumable_from(self, stored: "EvolutionConfig") -> bool:
        """Whether a stored run may continue under this config (only ``rounds`` may grow)."""
        mine = self.model_dump(exclude={"rounds"})
        theirs = stored.model_dump(exclude={"rounds"})
        return mine == theirs and self.rounds >= stored.rounds


class BestPoint(BaseModel):
    """Best-so-far fitness after a round; one row of best.csv."""

    round: int
    best_fitness: float
    best_candidate_id: int


class EvolutionRun(BaseModel):
    """Full record of a search."""

    config: EvolutionConfig
    dataset_name: str
    dataset_digest: Optional[str] = None
    candidates: List[Candidate] = Field(default_factory=list)
    best_trajectory: List[BestPoint] = Field(default_factory=list)
    started: datetime
    finished: Optional[datetime] = None

    @field_validator("best_trajectory")
    @classmethod
    def _check_trajectory(cls, value: List[BestPoint]) -> List[BestPoint]:
        for before, after in zip(value, value[1:]):
            if after.best_fitness < before.best_fitness:
                raise ValueError("best_trajectory must be non-decreasing")
        return value

    @property
    def valid_candidates(self) -> List[Candidate]:
        return [c for c in self.candidates if not c.failed]

    @property
    def best(self) -> Optional[Candidate]:
        valid = self.valid_candidates
        if not valid:
            return None
        return max(valid, key=lambda c: (c.fitness, -c.id))

    @property
    def completed_rounds(self) -> int:
        """Rounds whose best.csv row has been written (round 0 is the seed)."""
        return self.best_trajectory[-1].round if self.best_trajectory else -1


class Evaluation(BaseModel):
    """Outcome of evaluating one proposed source on the training data."""

    source: str
    fitness: Optional[float] = None
    failure_reason: Optional[str] = None
    complexity: Optional[ComplexityReport] = None
    lint: List[str] = Field(default_factory=list)
    score_digest: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.fitness is None


class ValidationRow(BaseModel):
    """A run candidate ranked by a held-out metric."""

    rank: int
    candidate_id: int
    round: int
    source: str
    train_fitness: float
    validation_score: float
