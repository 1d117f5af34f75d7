"""
Model operations - construction from counts and data compatibility checks
Created: 2026-10-18
"""

import logging
from typing import List, Optional, Tuple

from src.config import Config
from src.errors import InvalidCounts
from src.schemas import CompatibilityReport, ExperimentalData, ObservationalData, Study

logger = logging.getLogger(__name__)

Term = Tuple[str, float]


def experimental_from_counts(
    treated_n: int,
    treated_y: int,
    control_n: int,
    control_y: int,
) -> ExperimentalData:
    """
    Build experimental data from RCT arm counts.

    Args:
        treated_n: Units assigned do(x)
        treated_y: Of those, units exhibiting y
        control_n: Units assigned do(x')
        control_y: Of those, units exhibiting y

    Returns:
        ExperimentalData whose probabilities are the exact count ratios

    Raises:
        InvalidCounts: zero arm size, negative counts or more outcomes than units
    """
    for name, value in (
        ("treated_n", treated_n),
        ("treated_y", treated_y),
        ("control_n", control_n),
        ("control_y", control_y),
    ):
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidCounts(f"{name} must be an integer, got {value!r}")
        if value < 0:
            raise InvalidCounts(f"{name} must be nonnegative, got {value}")
    if treated_n == 0 or control_n == 0:
        raise InvalidCounts("arm sizes must be positive")
    if treated_y > treated_n:
        raise InvalidCounts(f"treated_y={treated_y} exceeds treated_n={treated_n}")
    if control_y > control_n:
        raise InvalidCounts(f"control_y={control_y} exceeds control_n={control_n}")

    try:
        p_y_do_x = treated_y / treated_n
        p_y_do_xp = control_y / control_n
    except OverflowError as e:
        raise InvalidCounts(f"counts too large to represent: {e}") from e

    return ExperimentalData(
        p_y_do_x=p_y_do_x,
        p_y_do_xp=p_y_do_xp,
        treated_n=treated_n,
        treated_y=treated_y,
        control_n=control_n,
        control_y=control_y,
    )


def observational_from_counts(n_xy: int, n_xyp: int, n_xpy: int, n_xpyp: int) -> ObservationalData:
    """Build observational data from the four joint cell counts"""
    counts = (n_xy, n_xyp, n_xpy, n_xpyp)
    for value in counts:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidCounts(f"cell counts must be integers, got {value!r}")
        if value < 0:
            raise InvalidCounts(f"cell counts must be nonnegative, got {value}")
    n = sum(counts)
    if n == 0:
        raise InvalidCounts("observational sample is empty")

    return ObservationalData(
        p_xy=n_xy / n,
        p_xyp=n_xyp / n,
        p_xpy=n_xpy / n,
        p_xpyp=n_xpyp / n,
        n_xy=n_xy,
        n_xyp=n_xyp,
        n_xpy=n_xpy,
        n_xpyp=n_xpyp,
    )


def complier_terms(
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
) -> Tuple[List[Term], List[Term]]:
    """
    Labelled max-terms (for L) and min-terms (for U) bounding P(complier|c).

    Observational terms are omitted when obs is None.
    """
    p_x = exp.p_y_do_x
    p_xp = exp.p_y_do_xp

    lower_terms: List[Term] = [
        ("0", 0.0),
        ("P(y_x|c) - P(y_x'|c)", p_x - p_xp),
    ]
    upper_terms: List[Term] = [
        ("P(y_x|c)", p_x),
        ("P(y'_x'|c)", exp.p_yp_do_xp),
    ]

    if obs is not None:
        lower_terms += [
            ("P(y|c) - P(y_x'|c)", obs.p_y - p_xp),
            ("P(y_x|c) - P(y|c)", p_x - obs.p_y),
        ]
        upper_terms += [
            ("P(x,y|c) + P(x',y'|c)", obs.p_xy + obs.p_xpyp),
            ("P(y_x|c) - P(y_x'|c) + P(x',y|c) + P(x,y'|c)", p_x - p_xp + obs.p_xpy + obs.p_xyp),
        ]

    return lower_terms, upper_terms


def check_compatibility(
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
) -> CompatibilityReport:
    """
    Check that the data regimes admit at least one model.

    Compatible iff L <= U + BOUND_TOLERANCE. Every (max-term, min-term) pair
    that crosses is listed as a violation.
    """
    lower_terms, upper_terms = complier_terms(exp, obs)
    l = max(value for _, value in lower_terms)
    u = min(value for _, value in upper_terms)

    violations = [
        f"{lname} = {lvalue:.6g} exceeds {uname} = {uvalue:.6g}"
        for lname, lvalue in lower_terms
        for uname, uvalue in upper_terms
        if lvalue > uvalue + Config.BOUND_TOLERANCE
    ]

    compatible = l <= u + Config.BOUND_TOLERANCE
    if not compatible:
        logger.debug("Incompatible data: L=%r > U=%r", l, u)

    return CompatibilityReport(compatible=compatible, l=l, u=u, violations=violations)


def validate_study(study: Study) -> List[Tuple[str, CompatibilityReport]]:
    """Compatibility report for every group, in input order"""
    return [
        (group.id, check_compatibility(group.experimental, group.observational))
        for group in study.groups
    ]
