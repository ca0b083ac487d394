"""LangGraph workflow for one evolution round."""
import logging

from langgraph.graph import END, StateGraph

from app.graph.nodes import compose_prompt_node, evaluate_node, propose_node, select_parents_node
from app.graph.supervisor import supervisor_router
from app.models.graph_state import RoundState

logger = logging.getLogger(__name__)


def create_round_workflow() -> StateGraph:
    """
    Create the LangGraph workflow for one round.

    Workflow:
    1. select_parents samples parents from the pool -> compose_prompt
    2. compose_prompt renders the mutation prompt -> propose
    3. propose asks the mutation client for proposals -> evaluate
    4. evaluate scores the proposals on the training data -> end
    Any node may set ``error``, which ends the round.
    """
    workflow = StateGraph(RoundState)

    workflow.add_node("select_parents", select_parents_node)
    workflow.add_node("compose_prompt", compose_prompt_node)
    workflow.add_node("propose", propose_node)
    workflow.add_node("evaluate", evaluate_node)

    workflow.add_conditional_edges(
        "select_parents",
        lambda state: supervisor_router(state),
        {
            "compose_prompt": "compose_prompt",
            "end": END,
        },
    )

    workflow.add_conditional_edges(
        "compose_prompt",
        lambda state: supervisor_router(state),
        {
            "propose": "propose",
            "end": END,
        },
    )

    workflow.add_conditional_edges(
        "propose",
        lambda state: supervisor_router(state),
        {
            "evaluate": "evaluate",
            "end": END,
        },
    )

    workflow.add_conditional_edges(
        "evaluate",
        lambda state: supervisor_router(state),
        {
            "end": END,
        },
    )

    workflow.set_entry_point("select_parents")

    return workflow
