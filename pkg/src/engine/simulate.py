"""
Seeded study simulation

Draws RCT arms and an observational sample from ground truths. Every group
gets its own generator derived from (seed, group index), so groups can be
generated in any order or in parallel and adding a group never changes the
draws of the groups before it.

Created: 2026-10-18
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np

from src.config import Config
from src.engine.model import experimental_from_counts, observational_from_counts
from src.engine.oracle import ground_truth_to_experimental, ground_truth_to_observational
from src.schemas import (
    BenefitVector,
    ExperimentCounts,
    GroundTruth,
    GroupData,
    ObservationalCounts,
    SimulationConfig,
    Study,
)

logger = logging.getLogger(__name__)


def group_generator(seed: int, group_index: int) -> np.random.Generator:
    """Independent PCG64 stream for one group"""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(group_index,)))


def sample_experiment(g: GroundTruth, n_per_arm: int, rng: np.random.Generator) -> ExperimentCounts:
    """Binomial outcomes for a treated and a control arm of n_per_arm units each"""
    exp = ground_truth_to_experimental(g)
    treated_y = int(rng.binomial(n_per_arm, exp.p_y_do_x))
    control_y = int(rng.binomial(n_per_arm, exp.p_y_do_xp))
    return ExperimentCounts(
        treated_n=n_per_arm,
        treated_y=treated_y,
        control_n=n_per_arm,
        control_y=control_y,
    )


def sample_observational(g: GroundTruth, n: int, rng: np.random.Generator) -> ObservationalCounts:
    """n draws from P(X, Y | c) under natural treatment choice"""
    if n == 0:
        return ObservationalCounts(0, 0, 0, 0)
    pvals = np.clip(np.array(ground_truth_to_observational(g).probabilities), 0.0, 1.0)
    pvals = pvals / pvals.sum()
    counts = rng.multinomial(n, pvals)
    return ObservationalCounts(*(int(c) for c in counts))


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def expected_experiment(g: GroundTruth, n_per_arm: int) -> ExperimentCounts:
    """Rounded expected arm counts (reproduces idealized published tables)"""
    exp = ground_truth_to_experimental(g)
    return ExperimentCounts(
        treated_n=n_per_arm,
        treated_y=min(n_per_arm, _round_half_up(n_per_arm * exp.p_y_do_x)),
        control_n=n_per_arm,
        control_y=min(n_per_arm, _round_half_up(n_per_arm * exp.p_y_do_xp)),
    )


def expected_observational(g: GroundTruth, n: int) -> ObservationalCounts:
    """Expected cell counts rounded by largest remainder, so they sum to n"""
    if n == 0:
        return ObservationalCounts(0, 0, 0, 0)
    raw = [n * p for p in ground_truth_to_observational(g).probabilities]
    floors = [int(math.floor(r)) for r in raw]
    shortfall = n - sum(floors)
    # largest fractional part first, ties by cell order
    order = sorted(range(4), key=lambda i: (-(raw[i] - floors[i]), i))
    for i in order[:shortfall]:
        floors[i] += 1
    return ObservationalCounts(*floors)


def _simulate_group(
    cfg: SimulationConfig,
    index: int,
    exact: bool,
) -> GroupData:
    group = cfg.groups[index]
    if exact:
        arms = expected_experiment(group.truth, cfg.n_per_arm)
        cells = expected_observational(group.truth, cfg.n_observational)
    else:
        rng = group_generator(cfg.seed, index)
        arms = sample_experiment(group.truth, cfg.n_per_arm, rng)
        cells = sample_observational(group.truth, cfg.n_observational, rng)

    observational = observational_from_counts(*cells) if cfg.n_observational > 0 else None
    return GroupData(
        id=group.id,
        experimental=experimental_from_counts(*arms),
        observational=observational,
    )


def generate_study(
    cfg: SimulationConfig,
    bv: BenefitVector,
    exact: bool = False,
    workers: int = 1,
) -> Study:
    """
    Simulate one GroupData per configured group.

    Args:
        cfg: Sample sizes, seed and the ground truth of every group
        bv: Benefit vector written into the study
        exact: Emit rounded expected counts instead of sampling
        workers: Threads generating groups; output is identical for any value

    Returns:
        Study in configuration order
    """
    indices = range(len(cfg.groups))
    workers = max(1, int(workers))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            groups: List[GroupData] = list(pool.map(lambda i: _simulate_group(cfg, i, exact), indices))
    else:
        groups = [_simulate_group(cfg, i, exact) for i in indices]

    logger.debug(
        "Simulated %d groups (n_per_arm=%d, n_observational=%d, exact=%s)",
        len(groups), cfg.n_per_arm, cfg.n_observational, exact,
    )
    return Study(benefit_vector=bv, groups=groups)


def rng_metadata(cfg: SimulationConfig, exact: bool) -> List[Tuple[str, object]]:
    """Ordered metadata entries recorded next to a simulated study"""
    return [
        ("generator", "expected-counts (no sampling)" if exact else Config.RNG_ALGORITHM),
        ("seed", cfg.seed),
        ("n_per_arm", cfg.n_per_arm),
        ("n_observational", cfg.n_observational),
        ("exact", exact),
    ]
