"""Supervisor that routes the round workflow."""
import logging
from typing import Literal

from app.models.graph_state import RoundState

logger = logging.getLogger(__name__)

ROUTES = {
    "prompt": "compose_prompt",
    "propose": "propose",
    "evaluate": "evaluate",
    "end": "end",
}


def supervisor_router(
    state: RoundState,
) -> Literal["compose_prompt", "propose", "evaluate", "end"]:
    """
    Determine the next step of a round from ``next_action``.

    The round always enters at parent selection. Any error ends it; a missing or
    unknown action ends it with a warning.
    """
    next_action = state.get("next_action")
    error = state.get("error")
    round_index = state.get("round_index")

    if error:
        logger.error(f"Round {round_index}: {error}, ending round")
        return "end"

    route = ROUTES.get(next_action) if next_action else None
    if route is None:
        logger.warning(f"Unknown next_action: {next_action}, ending round")
        return "end"
    logger.debug(f"Round {round_index}: routing to {route}")
    return route
