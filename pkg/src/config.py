"""
Configuration for the Unit Selection Engine

Numeric tolerances, CLI defaults and the benefit-vector presets used by the
case studies. Environment variables (optionally from a .env file) override the
defaults.

Created: 2026-10-18
"""

import os
from typing import Dict, List, Optional, Tuple
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


class Config:
    """
    Configuration for the unit selection engine

    Tolerances are far below the resolution of the data the engine is meant
    for (two-decimal probabilities, integer arm counts), so they only absorb
    floating point noise.
    """

    # ===========================================
    # NUMERIC TOLERANCES
    # ===========================================
    CELL_SUM_TOLERANCE: float = 1e-9  # observational cells / ground-truth cells must sum to 1
    BOUND_TOLERANCE: float = 1e-12  # L <= U comparison, point identification
    GAIN_EQUALITY_RTOL: float = 1e-9  # relative to max(1, |beta|+|gamma|+|theta|+|delta|)
    CONTAINMENT_TOLERANCE: float = 1e-10
    MONOTONIC_TOLERANCE: float = 1e-12  # defier mass treated as zero

    # ===========================================
    # DECISIONS & ESTIMATORS
    # ===========================================
    DECISION_THRESHOLD: float = 0.0  # positive => treat / select
    ESTIMATORS: Tuple[str, ...] = ("midpoint", "lower", "upper")
    DEFAULT_ESTIMATOR: str = os.getenv("UNITSELECT_ESTIMATOR", "midpoint")

    # ===========================================
    # ORACLE SETTINGS
    # ===========================================
    DEFAULT_GRID_STEP: float = float(os.getenv("UNITSELECT_GRID_STEP", "0.05"))
    MAX_GRID_STEP: float = 0.1
    MAX_GRID_POINTS: int = 5_000_000  # step 0.04 => 3.4M points; finer steps are refused

    # ===========================================
    # SIMULATION
    # ===========================================
    RNG_ALGORITHM: str = "numpy.random.PCG64 seeded by SeedSequence(seed, spawn_key=(group_index,))"
    DEFAULT_NATURAL_CHOICE: float = 0.5  # P(natural choice = x | response type)

    # ===========================================
    # OUTPUT & LOGGING
    # ===========================================
    OUTPUT_FORMATS: Tuple[str, ...] = ("table", "json")
    RESULTS_DIR: str = os.getenv("UNITSELECT_RESULTS_DIR", "results")
    LOG_DIR: Optional[str] = os.getenv("UNITSELECT_LOG_DIR")
    LOG_LEVEL: str = os.getenv("UNITSELECT_LOG_LEVEL", "INFO")
    SHOW_PROGRESS: bool = _env_bool("UNITSELECT_SHOW_PROGRESS", True)

    # ===========================================
    # BENEFIT VECTOR PRESETS (beta, gamma, theta, delta)
    # ===========================================
    # complier, always-taker, never-taker, defier
    BENEFIT_VECTOR_PRESETS: Dict[str, Tuple[float, float, float, float]] = {
        # enticement costs 5000, a hybrid car sale earns 50000
        "immediate_profit": (45000.0, -5000.0, 0.0, -50000.0),
        "increased_customers": (1.0, 0.0, 0.0, -1.0),
        # enticing an always-taker also costs an estimated 2000 long term
        "nonimmediate_profit": (45000.0, -7000.0, 0.0, -50000.0),
        "vaccine_effectiveness": (1.0, -1.0, -1.0, -1.0),
        "vaccine_affected_focus": (2.0, -1.0, -1.0, -2.0),
    }

    @classmethod
    def default_format(cls) -> str:
        """
        Default report format.

        Read at call time so UNITSELECT_FORMAT set after import still applies.
        """
        value = os.getenv("UNITSELECT_FORMAT", "table").strip().lower()
        return value if value in cls.OUTPUT_FORMATS else "table"

    @classmethod
    def preset_names(cls) -> List[str]:
        return sorted(cls.BENEFIT_VECTOR_PRESETS)

    @classmethod
    def validate_settings(cls) -> List[str]:
        """
        Validate environment-derived settings.

        Returns a list of problems; empty when everything is usable.
        """
        problems = []

        if cls.DEFAULT_ESTIMATOR not in cls.ESTIMATORS:
            problems.append(
                f"UNITSELECT_ESTIMATOR={cls.DEFAULT_ESTIMATOR!r} is not one of {', '.join(cls.ESTIMATORS)}"
            )

        if not (0.0 < cls.DEFAULT_GRID_STEP <= cls.MAX_GRID_STEP):
            problems.append(
                f"UNITSELECT_GRID_STEP={cls.DEFAULT_GRID_STEP} must lie in (0, {cls.MAX_GRID_STEP}]"
            )

        return problems
