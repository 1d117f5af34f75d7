"""
A/B test heuristics as restricted benefit vectors

a P(y_x|c) - b P(y_x'|c)
  = a P(complier) + (a - b) P(always-taker) - b P(defier)

so every heuristic is the benefit function of (a, a - b, 0, -b), and a benefit
vector is a heuristic exactly when theta = 0 and gamma = beta + delta.

Created: 2026-10-18
"""

from typing import Dict, Optional

from src.config import Config
from src.schemas import ABHeuristic, BenefitVector, ExperimentalData, RESPONSE_TYPES


def evaluate(h: ABHeuristic, exp: ExperimentalData) -> float:
    """Weighted difference between the effective rates under treatment and no treatment"""
    return h.a * exp.p_y_do_x - h.b * exp.p_y_do_xp


def induced_benefit_vector(h: ABHeuristic) -> BenefitVector:
    return BenefitVector(beta=h.a, gamma=h.a - h.b, theta=0.0, delta=-h.b)


def decompose(h: ABHeuristic) -> Dict[str, float]:
    """Weight the heuristic puts on each response type"""
    return induced_benefit_vector(h).as_dict()


def ab_representation(bv: BenefitVector) -> Optional[ABHeuristic]:
    """
    The heuristic whose score equals the benefit function, if one exists.

    Returns None when theta != 0 or gamma != beta + delta: no choice of (a, b)
    reproduces the vector.
    """
    tolerance = Config.GAIN_EQUALITY_RTOL * max(1.0, bv.l1_norm)
    if abs(bv.theta) > tolerance:
        return None
    if abs(bv.gamma - (bv.beta + bv.delta)) > tolerance:
        return None
    return ABHeuristic(a=bv.beta, b=-bv.delta)


def benefit_gap(bv: BenefitVector, h: ABHeuristic) -> Dict[str, float]:
    """Per-type payoff the heuristic misses: bv minus the heuristic's induced vector"""
    induced = induced_benefit_vector(h).as_tuple()
    return {
        rtype: wanted - got
        for rtype, wanted, got in zip(RESPONSE_TYPES, bv.as_tuple(), induced)
    }
