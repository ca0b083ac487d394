"""LangGraph nodes of one evolution round."""
import logging
from typing import Any, Dict, List, Set

from app.dsl.program import parse
from app.exceptions import DSLError, EvolutionError, MutationClientError
from app.graph.evaluation import evaluate_candidate
from app.graph.prompt import build_prompt, extract_programs
from app.graph.sampling import PARENT_STREAM, round_rng, sample_parents
from app.models.evolution import Candidate, Evaluation
from app.models.graph_state import RoundState

logger = logging.getLogger(__name__)

NO_PROGRAM = "no program found in reply"


def select_parents_node(state: RoundState) -> Dict[str, Any]:
    """Draw between ``parents_min`` and ``parents_per_prompt`` parents from the pool."""
    config = state["config"]
    rng = round_rng(config.seed, state["round_index"], PARENT_STREAM)
    k = int(rng.integers(config.parents_min, config.parents_per_prompt + 1))
    try:
        parents = sample_parents(
            state["pool"], k, config.top_percent, config.t_cand_sampling, rng
        )
    except EvolutionError as e:
        return {"error": str(e), "next_action": "end"}
    logger.debug(f"Round {state['round_index']}: parents {[p.id for p in parents]}")
    return {"parents": parents, "next_action": "prompt"}


def compose_prompt_node(state: RoundState) -> Dict[str, Any]:
    config = state["config"]
    prompt = build_prompt(
        config.task_description,
        state["parents"],
        config.constraints,
        metric=config.fitness_metric,
        domain_knowledge=config.domain_knowledge,
    )
    return {"prompt": prompt, "next_action": "propose"}


async def propose_node(state: RoundState) -> Dict[str, Any]:
    """
    Ask the mutation client for this round's proposals.

    A client failure leaves the round empty; the run goes on.
    """
    config = state["config"]
    try:
        responses = await state["client"].propose(
            state["prompt"],
            config.candidates_per_round,
            parents=state["parents"],
            round_index=state["round_index"],
        )
    except MutationClientError as e:
        logger.warning(
            f"Round {state['round_index']}: mutation client failed after {e.attempts} "
            f"attempts ({e}), round recorded as empty"
        )
        responses = []
    return {"responses": responses, "next_action": "evaluate"}


def _canonical_or_none(source: str):
    try:
        return parse(source).canonical
    except DSLError:
        return None


def evaluate_node(state: RoundState) -> Dict[str, Any]:
    """Extract, deduplicate and evaluate the proposals; build the new candidates."""
    config = state["config"]
    pool = state["pool"]
    seen: Set[str] = {candidate.source for candidate in pool}
    parent_ids = [parent.id for parent in state["parents"]]
    proposer = state["client"].name

    evaluations: List[Evaluation] = []
    for response in state["responses"]:
        sources = extract_programs(response)
        if not sources:
            evaluations.append(Evaluation(source="", failure_reason=NO_PROGRAM))
            continue
        for source in sources:
            canonical = _canonical_or_none(source)
            if config.dedup and canonical is not None and canonical in seen:
                logger.debug(f"Round {state['round_index']}: duplicate '{canonical}' skipped")
                continue
            evaluation = evaluate_candidate(
                source,
                state["train"],
                config.fitness_metric,
                allowed_channels=config.allowed_channels,
                max_features=config.max_features,
                arrays=state["train_arrays"],
                quality=state["quality"],
            )
            seen.add(evaluation.source)
            evaluations.append(evaluation)

    new_candidates = [
        Candidate(
            id=len(pool) + offset,
            round=state["round_index"],
            parent_ids=parent_ids,
            proposer=proposer,
            **evaluation.model_dump(),
        )
        for offset, evaluation in enumerate(evaluations)
    ]
    return {"new_candidates": new_candidates, "next_action": "end"}
