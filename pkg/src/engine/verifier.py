"""
Verification nodes - check closed-form bounds against the brute-force oracle
Created: 2026-10-18
"""

import logging

from src.engine.bounds import benefit_bounds
from src.engine.model import check_compatibility
from src.engine.oracle import brute_force_benefit_range
from src.errors import NoFeasiblePoint
from src.schemas import VerificationState

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
INCOMPATIBLE = "INCOMPATIBLE"
NO_FEASIBLE_POINT = "NO_FEASIBLE_POINT"


def verification_tolerance(state: VerificationState) -> float:
    """2 * grid_step * (|beta| + |gamma| + |theta| + |delta|)"""
    return 2.0 * state["grid_step"] * state["benefit_vector"].l1_norm


def compatibility_node(state: VerificationState) -> dict:
    """Check that the group's data admit a model at all"""
    report = check_compatibility(state["experimental"], state.get("observational"))
    update = {
        "compatibility": report,
        "tolerance": verification_tolerance(state),
    }
    if not report.compatible:
        update["verdict"] = INCOMPATIBLE
        update["message"] = f"L={report.l:.6g} exceeds U={report.u:.6g}"
    return update


def closed_form_node(state: VerificationState) -> dict:
    bounds = benefit_bounds(state["benefit_vector"], state["experimental"], state.get("observational"))
    return {"closed_form": bounds}


def brute_force_node(state: VerificationState) -> dict:
    """Scan the simplex grid for ground truths reproducing the data"""
    try:
        result = brute_force_benefit_range(
            state["benefit_vector"],
            state["experimental"],
            state.get("observational"),
            grid_step=state["grid_step"],
            match_tolerance=state.get("match_tolerance"),
            workers=state.get("workers", 1),
        )
    except NoFeasiblePoint as e:
        logger.warning("[%s] %s", state.get("group_id", "?"), e)
        return {"verdict": NO_FEASIBLE_POINT, "message": str(e)}
    return {"brute_force": result}


def judge_node(state: VerificationState) -> dict:
    """PASS when both endpoints of the brute-force range lie within tolerance of the closed form"""
    bounds = state["closed_form"]
    result = state["brute_force"]
    tolerance = state["tolerance"]

    deviation = max(abs(result.minimum - bounds.lower), abs(result.maximum - bounds.upper))
    verdict = PASS if deviation <= tolerance else FAIL
    message = "" if verdict == PASS else f"deviation {deviation:.6g} exceeds tolerance {tolerance:.6g}"
    return {"max_deviation": deviation, "verdict": verdict, "message": message}


def after_compatibility(state: VerificationState) -> str:
    """Conditional edge: stop on incompatible data"""
    return "end" if state.get("verdict") == INCOMPATIBLE else "continue"


def after_brute_force(state: VerificationState) -> str:
    """Conditional edge: stop when the grid holds no matching ground truth"""
    return "end" if state.get("verdict") == NO_FEASIBLE_POINT else "judge"
