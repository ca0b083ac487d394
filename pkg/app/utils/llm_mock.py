"""Offline mutation client for development and testing."""
import logging
from typing import List, Sequence

from app.dsl.mutate import mutate_random
from app.graph.sampling import PROPOSAL_STREAM, round_rng
from app.models.evolution import Candidate

logger = logging.getLogger(__name__)


class MockMutationClient:
    """
    Stands in for the evolution LLM by applying random AST edits to the parents.

    The prompt text is ignored. Each proposal picks one parent uniformly and returns its
    mutated canonical source inside a fenced block, so replies go through the same
    extraction path as real LLM output.
    """

    name = "mock"

    def __init__(self, seed: int):
        self.seed = seed

    async def propose(
        self,
        prompt: str,
        k: int,
        *,
        parents: Sequence[Candidate] = (),
        round_index: int = 0,
    ) -> List[str]:
        if not parents:
            return []
        rng = round_rng(self.seed, round_index, PROPOSAL_STREAM)
        replies: List[str] = []
        for _ in range(k):
            parent = parents[int(rng.integers(len(parents)))]
            child = mutate_random(parent.to_program(), rng)
            replies.append(f"```\n{child.canonical}\n```")
        logger.debug(f"Mock proposals for round {round_index}: {replies}")
        return replies
