"""
Main Entry Point - Unit selection pipelines
Created: 2026-10-18

Each run_* function turns loaded inputs into a report object. The CLI and the
batch scripts render and save those reports; nothing here prints.
"""

from typing import Any, Dict, List, Optional, Tuple

from tqdm import tqdm

from src.config import Config
from src.engine.bounds import (
    benefit_bounds,
    decide,
    estimate,
    gain_equality_check,
    point_estimate,
    point_estimate_coefficients,
    rank_groups,
    response_type_bounds,
    sigma,
    w_term,
)
from src.engine.heuristics import ab_representation, benefit_gap, decompose, evaluate
from src.engine.model import check_compatibility, validate_study
from src.engine.simulate import generate_study, rng_metadata
from src.engine.verifier import PASS
from src.graph import workflow
from src.schemas import (
    ABHeuristic,
    BenefitVector,
    BoundsReport,
    CompareReport,
    CompareRow,
    DecomposeReport,
    GroupBoundsRow,
    GroupData,
    RankingEntry,
    SimulatedGroup,
    SimulationConfig,
    Study,
    VerificationState,
    VerifyReport,
    VerifyRow,
)
from src.utils.logger import StudyLogger
from src.utils.study_io import study_to_dict


def _progress(items, desc: str):
    return tqdm(items, desc=desc, ncols=80, leave=False, disable=not Config.SHOW_PROGRESS)


def run_bounds(
    study: Study,
    estimator: str = Config.DEFAULT_ESTIMATOR,
    logger: Optional[StudyLogger] = None,
) -> BoundsReport:
    """
    Bounds, estimate and flags for every group, plus the ranking

    Args:
        study: Loaded study
        estimator: midpoint, lower or upper
        logger: Optional run logger

    Returns:
        BoundsReport with groups in input order; incompatible groups are
        flagged and left out of the ranking
    """
    bv = study.benefit_vector
    s = sigma(bv)
    gain_equal = gain_equality_check(bv)
    ab = ab_representation(bv)

    rows: List[GroupBoundsRow] = []
    compatible: List[GroupData] = []
    incompatible: List[str] = []

    for group in study.groups:
        exp, obs = group.experimental, group.observational
        report = check_compatibility(exp, obs)
        row: Dict[str, Any] = {
            "group_id": group.id,
            "compatible": report.compatible,
            "violations": report.violations,
            "sigma": s,
            "w": w_term(bv, exp),
            "l": report.l,
            "u": report.u,
            "gain_equality": gain_equal,
            "ab_expressible": ab is not None,
            "ab_heuristic": ab,
        }

        if report.compatible:
            b = benefit_bounds(bv, exp, obs)
            value = estimate(b, estimator)
            row.update(
                lower=b.lower,
                upper=b.upper,
                estimate=value,
                point_identified=b.point_identified,
                point_estimate=point_estimate(bv, exp) if gain_equal else None,
                response_type_bounds=response_type_bounds(exp, obs),
            )
            compatible.append(group)
            if logger:
                logger.log_group_bounds(group.id, b.lower, b.upper, value)
        else:
            incompatible.append(group.id)
            if logger:
                logger.log_incompatible(group.id, report.violations)

        rows.append(GroupBoundsRow(**row))

    ranking: List[RankingEntry] = []
    if compatible:
        ranking = rank_groups(study.model_copy(update={"groups": compatible}), estimator)
    ranks = {entry.group_id: i + 1 for i, entry in enumerate(ranking)}
    rows = [row.model_copy(update={"rank": ranks.get(row.group_id)}) for row in rows]

    return BoundsReport(
        benefit_vector=bv,
        estimator=estimator,
        groups=rows,
        ranking=ranking,
        incompatible_groups=incompatible,
    )


def run_compare(
    study: Study,
    heuristic: ABHeuristic,
    estimator: str = Config.DEFAULT_ESTIMATOR,
    logger: Optional[StudyLogger] = None,
) -> CompareReport:
    """Decisions of an A/B heuristic next to decisions from the benefit bounds"""
    bv = study.benefit_vector
    threshold = Config.DECISION_THRESHOLD
    rows: List[CompareRow] = []
    incompatible: List[str] = []

    for group in study.groups:
        exp, obs = group.experimental, group.observational
        value = evaluate(heuristic, exp)
        row: Dict[str, Any] = {
            "group_id": group.id,
            "heuristic_value": value,
            "heuristic_decision": decide(value, threshold),
        }

        report = check_compatibility(exp, obs)
        row.update(compatible=report.compatible, violations=report.violations)
        if report.compatible:
            b = benefit_bounds(bv, exp, obs)
            score = estimate(b, estimator)
            benefit_decision = decide(score, threshold)
            row.update(
                lower=b.lower,
                upper=b.upper,
                estimate=score,
                benefit_decision=benefit_decision,
                disagreement=benefit_decision != row["heuristic_decision"],
            )
            if logger:
                logger.log_group_bounds(group.id, b.lower, b.upper, score)
        else:
            incompatible.append(group.id)
            if logger:
                logger.log_incompatible(group.id, report.violations)

        rows.append(CompareRow(**row))

    return CompareReport(
        benefit_vector=bv,
        heuristic=heuristic,
        benefit_gap=benefit_gap(bv, heuristic),
        estimator=estimator,
        threshold=threshold,
        groups=rows,
        disagreements=sum(1 for row in rows if row.disagreement),
        incompatible_groups=incompatible,
    )


def verify_group(
    bv: BenefitVector,
    group: GroupData,
    grid_step: float,
    match_tolerance: Optional[float] = None,
    workers: int = 1,
) -> VerifyRow:
    """Run the verification workflow for one group"""
    initial_state: VerificationState = {
        "group_id": group.id,
        "benefit_vector": bv,
        "experimental": group.experimental,
        "observational": group.observational,
        "grid_step": grid_step,
        "match_tolerance": match_tolerance,
        "workers": workers,
    }
    final_state = workflow.invoke(initial_state)

    compatibility = final_state.get("compatibility")
    brute = final_state.get("brute_force")
    return VerifyRow(
        group_id=group.id,
        verdict=final_state["verdict"],
        closed_form=final_state.get("closed_form"),
        brute_force_min=brute.minimum if brute else None,
        brute_force_max=brute.maximum if brute else None,
        n_feasible=brute.n_feasible if brute else 0,
        max_deviation=final_state.get("max_deviation"),
        tolerance=final_state["tolerance"],
        violations=compatibility.violations if compatibility else [],
        message=final_state.get("message", ""),
    )


def run_verify(
    study: Study,
    grid_step: float = Config.DEFAULT_GRID_STEP,
    match_tolerance: Optional[float] = None,
    workers: int = 1,
    logger: Optional[StudyLogger] = None,
) -> VerifyReport:
    """Check the closed-form bounds of every group against the brute-force oracle"""
    bv = study.benefit_vector
    rows = []
    for group in _progress(study.groups, "Verifying"):
        row = verify_group(bv, group, grid_step, match_tolerance, workers)
        if logger:
            logger.log_verification(row.group_id, row.verdict, row.max_deviation, row.tolerance)
        rows.append(row)

    return VerifyReport(
        benefit_vector=bv,
        grid_step=grid_step,
        match_tolerance=grid_step if match_tolerance is None else match_tolerance,
        groups=rows,
        failures=sum(1 for row in rows if row.verdict != PASS),
    )


def run_simulate(
    groups: List[SimulatedGroup],
    bv: BenefitVector,
    n_per_arm: int,
    n_observational: int = 0,
    seed: int = 0,
    exact: bool = False,
    workers: int = 1,
) -> Tuple[Study, Dict[str, Any]]:
    """
    Simulate a study from ground truths

    Returns:
        The Study and its file document; the document's metadata records the
        generator, the sampling settings and any groups whose finite sample
        turned out incompatible
    """
    cfg = SimulationConfig(
        n_per_arm=n_per_arm,
        n_observational=n_observational,
        seed=seed,
        groups=groups,
    )
    study = generate_study(cfg, bv, exact=exact, workers=workers)

    metadata: Dict[str, Any] = dict(rng_metadata(cfg, exact))
    metadata["incompatible_groups"] = [
        group_id for group_id, report in validate_study(study) if not report.compatible
    ]
    return study, study_to_dict(study, metadata=metadata)


def run_decompose(bv: BenefitVector, heuristic: Optional[ABHeuristic] = None) -> DecomposeReport:
    """
    How a benefit vector (or the vector induced by a heuristic) splits over response types

    Args:
        bv: Benefit vector to describe
        heuristic: The heuristic bv was induced from, if any
    """
    gain_equal = gain_equality_check(bv)
    weights = decompose(heuristic) if heuristic is not None else bv.as_dict()
    return DecomposeReport(
        benefit_vector=bv,
        sigma=sigma(bv),
        gain_equality=gain_equal,
        identified_from_experiments=gain_equal,
        ab_heuristic=ab_representation(bv),
        response_type_weights=weights,
        point_estimate_formula=point_estimate_coefficients(bv) if gain_equal else None,
    )
