"""State model for the per-round LangGraph workflow."""
from typing import Any, List, Optional, TypedDict

import numpy as np

from app.data.arrays import SampleArrays
from app.models.dataset import Dataset
from app.models.evolution import Candidate, EvolutionConfig


class RoundState(TypedDict):
    """State passed through one evolution round."""

    round_index: int
    config: EvolutionConfig
    train: Dataset
    train_arrays: List[SampleArrays]
    quality: np.ndarray
    client: Any
    pool: List[Candidate]
    parents: List[Candidate]
    prompt: Optional[str]
    responses: List[str]
    new_candidates: List[Candidate]
    next_action: Optional[str]
    error: Optional[str]
