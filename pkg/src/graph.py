"""
LangGraph Workflow - Per-group verification of the closed-form bounds
Created: 2026-10-18
"""

from langgraph.graph import StateGraph, END

from src.schemas import VerificationState
from src.engine.verifier import (
    after_brute_force,
    after_compatibility,
    brute_force_node,
    closed_form_node,
    compatibility_node,
    judge_node,
)


def create_workflow():
    """Create and compile the verification workflow"""

    workflow = StateGraph(VerificationState)

    workflow.add_node("compatibility", compatibility_node)
    workflow.add_node("closed_form", closed_form_node)
    workflow.add_node("brute_force", brute_force_node)
    workflow.add_node("judge", judge_node)

    workflow.set_entry_point("compatibility")

    # Incompatible data have no bounds to verify
    workflow.add_conditional_edges(
        "compatibility",
        after_compatibility,
        {
            "continue": "closed_form",
            "end": END
        }
    )

    workflow.add_edge("closed_form", "brute_force")

    workflow.add_conditional_edges(
        "brute_force",
        after_brute_force,
        {
            "judge": "judge",
            "end": END
        }
    )

    workflow.add_edge("judge", END)

    return workflow.compile()


# Create workflow instance
workflow = create_workflow()
