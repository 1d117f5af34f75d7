"""
Shared fixtures: the vaccine case study, ground truths and seeded generators
"""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from src.engine.model import experimental_from_counts, observational_from_counts
from src.schemas import (
    BenefitVector,
    GroundTruth,
    GroupData,
    ResponseTypeDistribution,
    Study,
)

PROJECT_ROOT = Path(__file__).resolve().parent.parent

VACCINE = BenefitVector(beta=1.0, gamma=-1.0, theta=-1.0, delta=-1.0)
INCREASED_CUSTOMERS = BenefitVector(beta=1.0, gamma=0.0, theta=0.0, delta=-1.0)

# joint that reproduces the c2 observational sample (5, 95, 13, 247) / 360
C2_CONFOUNDED_JOINT = (0.0, 234 / 360, 5 / 360, 13 / 360, 5 / 360, 13 / 360, 90 / 360, 0.0)


@pytest.fixture
def inputs_dir() -> Path:
    return PROJECT_ROOT / "evaluation_inputs"


@pytest.fixture
def c1_experimental():
    return experimental_from_counts(750, 450, 750, 225)


@pytest.fixture
def c2_experimental():
    return experimental_from_counts(750, 525, 750, 225)


@pytest.fixture
def c2_observational():
    return observational_from_counts(5, 95, 13, 247)


@pytest.fixture
def vaccine_study(c1_experimental, c2_experimental) -> Study:
    return Study(
        benefit_vector=VACCINE,
        groups=[
            GroupData(id="c1", experimental=c1_experimental),
            GroupData(id="c2", experimental=c2_experimental),
        ],
    )


@pytest.fixture
def vaccine_study_with_observational(c1_experimental, c2_experimental, c2_observational) -> Study:
    return Study(
        benefit_vector=VACCINE,
        groups=[
            GroupData(id="c1", experimental=c1_experimental),
            GroupData(id="c2", experimental=c2_experimental, observational=c2_observational),
        ],
    )


@pytest.fixture
def vaccine_truths():
    c1 = ResponseTypeDistribution(complier=0.35, always_taker=0.25, never_taker=0.35, defier=0.05)
    c2 = ResponseTypeDistribution(complier=0.65, always_taker=0.05, never_taker=0.05, defier=0.25)
    return {
        "c1": GroundTruth.from_response_types(c1),
        "c2": GroundTruth.from_response_types(c2),
    }


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20261018)


@pytest.fixture
def make_ground_truth() -> Callable[[np.random.Generator], GroundTruth]:
    """Random joint over the 8 cells; pass on_grid=20 for multiples of 1/20"""

    def factory(rng: np.random.Generator, on_grid: int = 0, defier_free: bool = False) -> GroundTruth:
        weights = rng.dirichlet(np.ones(8))
        if defier_free:
            weights[6:] = 0.0
            weights = weights / weights.sum()
        if on_grid:
            counts = rng.multinomial(on_grid, weights)
            joint = tuple(float(c) / on_grid for c in counts)
        else:
            joint = tuple(float(w) for w in weights)
        return GroundTruth(joint=joint)

    return factory


@pytest.fixture
def make_benefit_vector() -> Callable[[np.random.Generator], BenefitVector]:
    """Random payoffs in [-5, 5]; gain_equal=True forces beta = gamma + theta - delta"""

    def factory(rng: np.random.Generator, gain_equal: bool = False, integer: bool = False) -> BenefitVector:
        if integer:
            values = [float(v) for v in rng.integers(-5, 6, size=4)]
        else:
            values = [float(v) for v in rng.uniform(-5.0, 5.0, size=4)]
        if gain_equal:
            values[0] = values[1] + values[2] - values[3]
        return BenefitVector.from_tuple(tuple(values))

    return factory
