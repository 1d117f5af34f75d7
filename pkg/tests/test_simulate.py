"""
Tests for seeded study simulation
"""

import math

import pytest
from pydantic import ValidationError

from src.engine.model import check_compatibility
from src.engine.oracle import ground_truth_to_experimental
from src.engine.simulate import (
    expected_experiment,
    expected_observational,
    generate_study,
    group_generator,
    rng_metadata,
    sample_experiment,
    sample_observational,
)
from src.schemas import GroundTruth, ResponseTypeDistribution, SimulatedGroup, SimulationConfig
from tests.conftest import C2_CONFOUNDED_JOINT, VACCINE


def _config(truths, n_per_arm=750, n_observational=0, seed=0):
    return SimulationConfig(
        n_per_arm=n_per_arm,
        n_observational=n_observational,
        seed=seed,
        groups=[SimulatedGroup(id=group_id, truth=truth) for group_id, truth in truths.items()],
    )


class TestSampleExperiment:

    def test_degenerate_probabilities(self):
        rt = ResponseTypeDistribution(complier=1.0, always_taker=0.0, never_taker=0.0, defier=0.0)
        g = GroundTruth.from_response_types(rt)
        for seed in range(5):
            counts = sample_experiment(g, 100, group_generator(seed, 0))
            assert counts == (100, 100, 100, 0)

    def test_fixed_seed_is_deterministic(self, vaccine_truths):
        first = sample_experiment(vaccine_truths["c1"], 750, group_generator(42, 0))
        second = sample_experiment(vaccine_truths["c1"], 750, group_generator(42, 0))
        assert first == second

    def test_counts_within_three_sigma(self, vaccine_truths):
        n = 750
        exp = ground_truth_to_experimental(vaccine_truths["c1"])
        treated_sd = 3 * math.sqrt(n * exp.p_y_do_x * (1 - exp.p_y_do_x))
        control_sd = 3 * math.sqrt(n * exp.p_y_do_xp * (1 - exp.p_y_do_xp))

        seeds = range(1000)
        treated_ok = control_ok = 0
        for seed in seeds:
            counts = sample_experiment(vaccine_truths["c1"], n, group_generator(seed, 0))
            treated_ok += abs(counts.treated_y - 450) <= treated_sd
            control_ok += abs(counts.control_y - 225) <= control_sd
        assert treated_ok >= 0.99 * len(seeds)
        assert control_ok >= 0.99 * len(seeds)

    def test_large_sample_converges(self, vaccine_truths):
        n = 1_000_000
        counts = sample_experiment(vaccine_truths["c2"], n, group_generator(3, 0))
        assert counts.treated_y / n == pytest.approx(0.7, abs=0.005)
        assert counts.control_y / n == pytest.approx(0.3, abs=0.005)


class TestSampleObservational:

    def test_empty_sample(self, vaccine_truths):
        assert sample_observational(vaccine_truths["c1"], 0, group_generator(0, 0)) == (0, 0, 0, 0)

    def test_uniform_joint(self):
        g = GroundTruth(joint=(0.125,) * 8)
        n = 1_000_000
        counts = sample_observational(g, n, group_generator(11, 0))
        assert sum(counts) == n
        for count in counts:
            assert count / n == pytest.approx(0.25, abs=0.005)

    def test_fixed_seed_is_deterministic(self, vaccine_truths):
        first = sample_observational(vaccine_truths["c2"], 500, group_generator(9, 1))
        second = sample_observational(vaccine_truths["c2"], 500, group_generator(9, 1))
        assert first == second


class TestExpectedCounts:

    def test_vaccine_arm_counts(self, vaccine_truths):
        assert expected_experiment(vaccine_truths["c1"], 750) == (750, 450, 750, 225)
        assert expected_experiment(vaccine_truths["c2"], 750) == (750, 525, 750, 225)

    def test_confounded_observational_counts(self):
        counts = expected_observational(GroundTruth(joint=C2_CONFOUNDED_JOINT), 360)
        assert counts == (5, 95, 13, 247)

    def test_joint_at_sum_tolerance(self):
        g = GroundTruth(joint=(0.5, 0.5 + 6e-10, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
        assert expected_experiment(g, 750) == (750, 750, 750, 0)

    def test_largest_remainder_sums_to_n(self, rng, make_ground_truth):
        for n in (1, 7, 100, 333):
            counts = expected_observational(make_ground_truth(rng), n)
            assert sum(counts) == n


class TestGenerateStudy:

    def test_vaccine_study_is_near_truth(self, vaccine_truths):
        study = generate_study(_config(vaccine_truths, seed=2026), VACCINE)
        lift = [g.experimental.p_y_do_x - g.experimental.p_y_do_xp for g in study.groups]
        assert lift == pytest.approx([0.3, 0.4], abs=0.1)
        assert all(g.observational is None for g in study.groups)
        assert study.benefit_vector == VACCINE

    def test_single_unit_arms(self, vaccine_truths):
        study = generate_study(_config({"c1": vaccine_truths["c1"]}, n_per_arm=1, seed=5), VACCINE)
        exp = study.groups[0].experimental
        assert exp.p_y_do_x in (0.0, 1.0)
        assert exp.p_y_do_xp in (0.0, 1.0)

    def test_observational_blocks(self, vaccine_truths):
        study = generate_study(_config(vaccine_truths, n_observational=400, seed=1), VACCINE)
        for group in study.groups:
            assert group.observational is not None
            assert sum(group.observational.counts) == 400

    def test_same_config_same_study(self, vaccine_truths):
        cfg = _config(vaccine_truths, n_observational=200, seed=7)
        assert generate_study(cfg, VACCINE) == generate_study(cfg, VACCINE)

    def test_workers_do_not_change_result(self, vaccine_truths):
        cfg = _config(vaccine_truths, n_observational=200, seed=7)
        assert generate_study(cfg, VACCINE, workers=1) == generate_study(cfg, VACCINE, workers=4)

    def test_adding_group_keeps_earlier_draws(self, vaccine_truths):
        one = generate_study(_config({"c1": vaccine_truths["c1"]}, seed=13), VACCINE)
        two = generate_study(_config(vaccine_truths, seed=13), VACCINE)
        assert one.groups[0] == two.groups[0]

    def test_large_samples_are_compatible(self, vaccine_truths):
        cfg = _config(vaccine_truths, n_per_arm=1_000_000, n_observational=1_000_000, seed=21)
        for group in generate_study(cfg, VACCINE).groups:
            exp = group.experimental
            truth = ground_truth_to_experimental(vaccine_truths[group.id])
            assert exp.p_y_do_x == pytest.approx(truth.p_y_do_x, abs=0.005)
            assert check_compatibility(exp, group.observational).compatible

    def test_duplicate_ids_rejected(self, vaccine_truths):
        with pytest.raises(ValidationError):
            SimulationConfig(
                n_per_arm=10,
                groups=[
                    SimulatedGroup(id="a", truth=vaccine_truths["c1"]),
                    SimulatedGroup(id="a", truth=vaccine_truths["c2"]),
                ],
            )

    def test_metadata(self, vaccine_truths):
        meta = dict(rng_metadata(_config(vaccine_truths, seed=99), exact=False))
        assert meta["seed"] == 99
        assert "PCG64" in meta["generator"]
        assert dict(rng_metadata(_config(vaccine_truths), exact=True))["exact"] is True
