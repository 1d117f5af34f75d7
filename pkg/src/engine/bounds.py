"""
Benefit-function bounds

Closed-form bounds on f(c) = beta*P(complier|c) + gamma*P(always-taker|c)
+ theta*P(never-taker|c) + delta*P(defier|c) from experimental and (optional)
observational data, plus the point formula that applies under gain equality
or monotonicity.

f(c) = W + sigma * P(complier|c) once the experimental data are fixed, so the
interval on f follows from the interval [L, U] on P(complier|c).

Created: 2026-10-18
"""

import logging
from typing import Dict, List, Optional, Tuple

from src.config import Config
from src.engine.model import check_compatibility
from src.errors import IncompatibleData
from src.schemas import (
    BenefitBounds,
    BenefitVector,
    ExperimentalData,
    ObservationalData,
    RankingEntry,
    ResponseTypeInterval,
    Study,
)

logger = logging.getLogger(__name__)


def sigma(bv: BenefitVector) -> float:
    """beta - gamma - theta + delta"""
    return bv.beta - bv.gamma - bv.theta + bv.delta


def w_term(bv: BenefitVector, exp: ExperimentalData) -> float:
    """(gamma - delta) P(y_x|c) + delta P(y_x'|c) + theta P(y'_x'|c)"""
    return (
        (bv.gamma - bv.delta) * exp.p_y_do_x
        + bv.delta * exp.p_y_do_xp
        + bv.theta * exp.p_yp_do_xp
    )


def complier_bounds(
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
) -> Tuple[float, float]:
    """
    Bounds [L, U] on P(complier|c).

    Raises:
        IncompatibleData: L > U beyond the bound tolerance
    """
    report = check_compatibility(exp, obs)
    if not report.compatible:
        raise IncompatibleData(
            f"L={report.l:.6g} exceeds U={report.u:.6g} ({'; '.join(report.violations)})",
            report=report,
        )
    return report.l, report.u


def gain_equality_check(bv: BenefitVector) -> bool:
    """beta + delta == gamma + theta, relative to the size of the payoffs"""
    scale = max(1.0, bv.l1_norm)
    return abs((bv.beta + bv.delta) - (bv.gamma + bv.theta)) <= Config.GAIN_EQUALITY_RTOL * scale


def benefit_bounds(
    bv: BenefitVector,
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
) -> BenefitBounds:
    """
    Tight bounds on the benefit function of one group.

    sigma > 0: [W + sigma L, W + sigma U]; sigma < 0: [W + sigma U, W + sigma L];
    sigma == 0 (gain equality): the point [W, W].
    """
    l, u = complier_bounds(exp, obs)
    s = sigma(bv)
    w = w_term(bv, exp)

    if gain_equality_check(bv):
        return BenefitBounds(lower=w, upper=w, sigma=s, w=w, l=l, u=u, point_identified=True)

    if s > 0:
        lower, upper = w + s * l, w + s * u
    else:
        lower, upper = w + s * u, w + s * l

    return BenefitBounds(
        lower=lower,
        upper=upper,
        sigma=s,
        w=w,
        l=l,
        u=u,
        point_identified=abs(upper - lower) <= Config.BOUND_TOLERANCE,
    )


def point_estimate_coefficients(bv: BenefitVector) -> Dict[str, float]:
    """Coefficients of f(c) = (beta - theta) P(y_x|c) + (gamma - beta) P(y_x'|c) + theta"""
    return {
        "p_y_do_x": bv.beta - bv.theta,
        "p_y_do_xp": bv.gamma - bv.beta,
        "constant": bv.theta,
    }


def point_estimate(bv: BenefitVector, exp: ExperimentalData) -> float:
    """
    Point value of f(c) under gain equality or monotonicity.

    Computed unconditionally. When the vector is not gain-equal the result is
    only valid for a population known to have no defiers; the caller is
    responsible for that premise (see point_estimate_requires_assumption).
    """
    if point_estimate_requires_assumption(bv):
        logger.debug("point_estimate on a non gain-equal vector assumes monotonicity")
    return (bv.beta - bv.theta) * exp.p_y_do_x + (bv.gamma - bv.beta) * exp.p_y_do_xp + bv.theta


def point_estimate_requires_assumption(bv: BenefitVector) -> bool:
    """True when point_estimate is only valid under monotonicity"""
    return not gain_equality_check(bv)


def midpoint_estimate(b: BenefitBounds) -> float:
    return (b.lower + b.upper) / 2.0


def estimate(b: BenefitBounds, estimator: str = "midpoint") -> float:
    """Reduce an interval to a single score: midpoint, lower or upper"""
    if estimator == "midpoint":
        return midpoint_estimate(b)
    if estimator == "lower":
        return b.lower
    if estimator == "upper":
        return b.upper
    raise ValueError(f"unknown estimator {estimator!r}; expected one of {', '.join(Config.ESTIMATORS)}")


def decide(value: float, threshold: float = Config.DECISION_THRESHOLD) -> bool:
    """Select / treat iff the score is strictly positive (above threshold)"""
    return value > threshold


def response_type_bounds(
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
) -> Dict[str, ResponseTypeInterval]:
    """
    Intervals on all four response-type probabilities.

    With the experimental data fixed, every type is an affine function of
    P(complier): always-taker = P(y_x) - C, never-taker = 1 - P(y_x') - C,
    defier = P(y_x') - P(y_x) + C.
    """
    l, u = complier_bounds(exp, obs)
    p_x, p_xp = exp.p_y_do_x, exp.p_y_do_xp
    return {
        "complier": ResponseTypeInterval(lower=l, upper=u),
        "always_taker": ResponseTypeInterval(lower=p_x - u, upper=p_x - l),
        "never_taker": ResponseTypeInterval(lower=1.0 - p_xp - u, upper=1.0 - p_xp - l),
        "defier": ResponseTypeInterval(lower=p_xp - p_x + l, upper=p_xp - p_x + u),
    }


def rank_groups(study: Study, estimator: str = "midpoint") -> List[RankingEntry]:
    """
    Rank groups by estimated benefit, best first.

    Ties are broken by group id ascending.

    Raises:
        IncompatibleData: naming the first group whose data admit no model
    """
    entries = []
    for group in study.groups:
        try:
            b = benefit_bounds(study.benefit_vector, group.experimental, group.observational)
        except IncompatibleData as e:
            raise IncompatibleData(str(e), group_id=group.id, report=e.report) from e
        entries.append(RankingEntry(group_id=group.id, estimate=estimate(b, estimator), bounds=b))

    entries.sort(key=lambda entry: (-entry.estimate, entry.group_id))
    return entries
