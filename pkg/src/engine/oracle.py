"""
Ground-truth oracle

Exact benefit from a known response-type distribution, the data a study would
observe under a ground truth, and a brute-force search over a grid on the
8-cell simplex (response type x natural choice) used to check that the
closed-form bounds are valid and attained.

Created: 2026-10-18
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from src.config import Config
from src.errors import NoFeasiblePoint
from src.schemas import (
    BenefitVector,
    BruteForceRange,
    ExperimentalData,
    GroundTruth,
    ObservationalData,
    ResponseTypeDistribution,
)

logger = logging.getLogger(__name__)

N_CELLS = 8

# Rows of the joint (JOINT_CELLS order) that make up each observable quantity
_EXPERIMENTAL_CELLS = {
    "p_y_do_x": (0, 1, 2, 3),  # complier + always-taker
    "p_y_do_xp": (2, 3, 6, 7),  # always-taker + defier
}
_OBSERVATIONAL_CELLS = {
    "p_xy": (0, 2),  # chose x; complier or always-taker
    "p_xyp": (4, 6),  # chose x; never-taker or defier
    "p_xpy": (3, 7),  # chose x'; always-taker or defier
    "p_xpyp": (1, 5),  # chose x'; complier or never-taker
}


def exact_benefit(bv: BenefitVector, rt: ResponseTypeDistribution) -> float:
    """Average payoff per selected unit when the type shares are known"""
    return (
        bv.beta * rt.complier
        + bv.gamma * rt.always_taker
        + bv.theta * rt.never_taker
        + bv.delta * rt.defier
    )


def ground_truth_to_experimental(g: GroundTruth) -> ExperimentalData:
    rt = g.response_types
    return ExperimentalData(
        p_y_do_x=min(1.0, rt.complier + rt.always_taker),
        p_y_do_xp=min(1.0, rt.always_taker + rt.defier),
    )


def ground_truth_to_observational(g: GroundTruth) -> ObservationalData:
    """
    Observational joint implied by the consistency rule.

    A unit that naturally chooses x shows its outcome under do(x), one that
    chooses x' shows its outcome under do(x').
    """
    cells = {
        name: min(1.0, sum(g.joint[i] for i in idx))
        for name, idx in _OBSERVATIONAL_CELLS.items()
    }
    return ObservationalData(**cells)


def is_monotonic(rt: ResponseTypeDistribution) -> bool:
    """No defiers"""
    return rt.defier <= Config.MONOTONIC_TOLERANCE


def indistinguishable_pair(
    g: GroundTruth,
    eps: Optional[float] = None,
) -> Tuple[GroundTruth, GroundTruth]:
    """
    Two ground truths with identical experimental data.

    Moves eps of mass from always-takers and never-takers to compliers and
    defiers, eps each inside one natural-choice slice. P(y_x) and P(y_x')
    are unchanged while the benefit moves by eps * sigma, which makes the pair
    a witness that f(c) is not identified when sigma != 0.

    Args:
        g: Ground truth to perturb; the shift happens in whichever
            natural-choice slice has more always-taker and never-taker mass
        eps: Mass to move; half the largest feasible shift when omitted

    Raises:
        ValueError: when g has no always-taker or never-taker mass to move
    """
    j = list(g.joint)
    # indices: complier 0/1, always-taker 2/3, never-taker 4/5, defier 6/7
    room_x = min(j[2], j[4])
    room_xp = min(j[3], j[5])
    if room_x >= room_xp:
        slot, room = 0, room_x
    else:
        slot, room = 1, room_xp
    if room <= 0.0:
        raise ValueError("ground truth has no always-taker/never-taker mass to shift")
    if eps is None:
        eps = room / 2.0
    if not (0.0 < eps <= room):
        raise ValueError(f"eps={eps!r} outside (0, {room!r}]")

    shifted = list(j)
    shifted[0 + slot] += eps
    shifted[2 + slot] -= eps
    shifted[4 + slot] -= eps
    shifted[6 + slot] += eps
    return g, GroundTruth(joint=tuple(shifted))


# ===========================================
# BRUTE-FORCE GRID ORACLE
# ===========================================


def grid_resolution(grid_step: float) -> int:
    """
    Number of grid divisions per unit of mass.

    Uses ceil(1 / grid_step) so the effective step never exceeds the request.
    """
    if not (0.0 < grid_step <= Config.MAX_GRID_STEP):
        raise ValueError(f"grid_step must lie in (0, {Config.MAX_GRID_STEP}], got {grid_step!r}")
    resolution = max(1, math.ceil(1.0 / grid_step - 1e-9))
    n_points = math.comb(resolution + N_CELLS - 1, N_CELLS - 1)
    if n_points > Config.MAX_GRID_POINTS:
        raise ValueError(
            f"grid_step={grid_step!r} needs {n_points} grid points (limit {Config.MAX_GRID_POINTS})"
        )
    return resolution


@lru_cache(maxsize=4)
def simplex_grid(resolution: int) -> np.ndarray:
    """
    All 8-cell compositions of `resolution` as an int16 array of shape (M, 8).

    Stars and bars: each 7-subset of range(resolution + 7) marks the bar
    positions; M = C(resolution + 7, 7).
    """
    bars = N_CELLS - 1
    n_points = math.comb(resolution + bars, bars)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(resolution + bars), bars)),
        dtype=np.int32,
        count=n_points * bars,
    ).reshape(n_points, bars)
    edges = np.hstack([
        np.full((n_points, 1), -1, dtype=np.int32),
        flat,
        np.full((n_points, 1), resolution + bars, dtype=np.int32),
    ])
    counts = (np.diff(edges, axis=1) - 1).astype(np.int16)
    logger.debug("Built simplex grid: resolution=%d points=%d", resolution, n_points)
    counts.setflags(write=False)
    return counts


def _marginal_matrix(cells: dict) -> np.ndarray:
    matrix = np.zeros((N_CELLS, len(cells)), dtype=np.int16)
    for col, idx in enumerate(cells.values()):
        matrix[list(idx), col] = 1
    return matrix


_EXPERIMENTAL_MATRIX = _marginal_matrix(_EXPERIMENTAL_CELLS)
_OBSERVATIONAL_MATRIX = _marginal_matrix(_OBSERVATIONAL_CELLS)
# benefit weights per joint cell: each type appears under both natural choices
_TYPE_OF_CELL = np.repeat(np.arange(4), 2)


def _scan_chunk(
    counts: np.ndarray,
    resolution: int,
    payoffs: np.ndarray,
    exp_target: np.ndarray,
    obs_target: Optional[np.ndarray],
    tolerance: float,
) -> Tuple[float, float, int]:
    """Masked min/max/count of the benefit over one slice of the grid"""
    exp_values = (counts @ _EXPERIMENTAL_MATRIX) / resolution
    feasible = np.all(np.abs(exp_values - exp_target) <= tolerance, axis=1)

    if obs_target is not None:
        obs_values = (counts @ _OBSERVATIONAL_MATRIX) / resolution
        feasible &= np.all(np.abs(obs_values - obs_target) <= tolerance, axis=1)

    n_feasible = int(np.count_nonzero(feasible))
    if n_feasible == 0:
        return math.inf, -math.inf, 0

    benefit = (counts[feasible] @ payoffs) / resolution
    return float(benefit.min()), float(benefit.max()), n_feasible


def brute_force_benefit_range(
    bv: BenefitVector,
    exp: ExperimentalData,
    obs: Optional[ObservationalData] = None,
    grid_step: float = Config.DEFAULT_GRID_STEP,
    match_tolerance: Optional[float] = None,
    workers: int = 1,
) -> BruteForceRange:
    """
    Range of the exact benefit over grid ground truths that reproduce the data.

    Args:
        bv: Benefit vector
        exp: Experimental data to match
        obs: Observational data to match (ignored when None)
        grid_step: Grid resolution on the 8-cell simplex, in (0, 0.1]
        match_tolerance: Allowed absolute deviation per matched quantity;
            defaults to grid_step. With the default, ground truths up to one
            step away from the data count as matches, so the range can be
            wider than the closed-form interval (exp=(1.0, 0.0) pins the
            benefit to beta, yet the range still covers its grid neighbours).
            Pass a tiny tolerance with on-grid data for the exact extremes.
        workers: Threads scanning disjoint slices of the grid; the result does
            not depend on it

    Returns:
        BruteForceRange(minimum, maximum, n_feasible)

    Raises:
        NoFeasiblePoint: no grid point matches the data
    """
    resolution = grid_resolution(grid_step)
    tolerance = grid_step if match_tolerance is None else match_tolerance
    # absorbs float noise in counts / resolution at the tolerance boundary
    tolerance += 1e-9

    counts = simplex_grid(resolution)
    payoffs = np.asarray(bv.as_tuple(), dtype=np.float64)[_TYPE_OF_CELL]
    exp_target = np.array([exp.p_y_do_x, exp.p_y_do_xp])
    obs_target = None if obs is None else np.array(obs.probabilities)

    workers = max(1, int(workers))
    chunks: List[np.ndarray] = np.array_split(counts, workers) if workers > 1 else [counts]

    def scan(chunk: np.ndarray) -> Tuple[float, float, int]:
        return _scan_chunk(chunk, resolution, payoffs, exp_target, obs_target, tolerance)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(scan, chunks))
    else:
        partials = [scan(chunks[0])]

    n_feasible = sum(p[2] for p in partials)
    if n_feasible == 0:
        raise NoFeasiblePoint(
            f"no ground truth on the step-{1.0 / resolution:g} grid matches the data "
            f"within {tolerance - 1e-9:g}"
        )

    return BruteForceRange(
        minimum=min(p[0] for p in partials),
        maximum=max(p[1] for p in partials),
        n_feasible=n_feasible,
    )
