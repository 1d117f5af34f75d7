"""
Pydantic V2 Schemas for the Unit Selection Engine

Domain values (benefit vectors, data regimes, ground truths), result values
(bounds, oracle ranges) and the report models shared by JSON and table output.
All domain values are frozen after construction.

Created: 2026-10-18
"""

import math
from typing import Dict, List, Literal, NamedTuple, Optional, Tuple, TypedDict

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import Config

# Fixed order used everywhere a response-type tuple appears
RESPONSE_TYPES: Tuple[str, str, str, str] = ("complier", "always_taker", "never_taker", "defier")

# GroundTruth.joint layout: type-major, natural choice x then x'
JOINT_CELLS: Tuple[str, ...] = tuple(
    f"{rtype}|{choice}" for rtype in RESPONSE_TYPES for choice in ("x", "xp")
)

Probability = float
Verdict = Literal["PASS", "FAIL", "INCOMPATIBLE", "NO_FEASIBLE_POINT"]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ===========================================
# MODEL
# ===========================================


class BenefitVector(_Frozen):
    """Payoffs of selecting a complier, always-taker, never-taker and defier"""
    beta: float = Field(allow_inf_nan=False, description="Payoff of selecting a complier")
    gamma: float = Field(allow_inf_nan=False, description="Payoff of selecting an always-taker")
    theta: float = Field(allow_inf_nan=False, description="Payoff of selecting a never-taker")
    delta: float = Field(allow_inf_nan=False, description="Payoff of selecting a defier")

    @classmethod
    def from_tuple(cls, values: Tuple[float, float, float, float]) -> "BenefitVector":
        beta, gamma, theta, delta = values
        return cls(beta=beta, gamma=gamma, theta=theta, delta=delta)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.beta, self.gamma, self.theta, self.delta)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(RESPONSE_TYPES, self.as_tuple()))

    def scaled(self, factor: float) -> "BenefitVector":
        return BenefitVector.from_tuple(tuple(factor * v for v in self.as_tuple()))

    @property
    def l1_norm(self) -> float:
        return sum(abs(v) for v in self.as_tuple())


class ExperimentalData(_Frozen):
    """Causal effects P(y_x|c) and P(y_x'|c), optionally with the arm counts behind them"""
    p_y_do_x: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    p_y_do_xp: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    treated_n: Optional[int] = Field(default=None, ge=0)
    treated_y: Optional[int] = Field(default=None, ge=0)
    control_n: Optional[int] = Field(default=None, ge=0)
    control_y: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_counts(self) -> "ExperimentalData":
        counts = (self.treated_n, self.treated_y, self.control_n, self.control_y)
        if all(c is None for c in counts):
            return self
        if any(c is None for c in counts):
            raise ValueError("either all four arm counts are given or none")
        if self.treated_n == 0 or self.control_n == 0:
            raise ValueError("arm sizes must be positive")
        if self.treated_y > self.treated_n or self.control_y > self.control_n:
            raise ValueError("outcome count exceeds arm size")
        if self.p_y_do_x != self.treated_y / self.treated_n or self.p_y_do_xp != self.control_y / self.control_n:
            raise ValueError("probabilities do not equal the count ratios")
        return self

    @property
    def p_yp_do_xp(self) -> Probability:
        """P(y'_x'|c)"""
        return 1.0 - self.p_y_do_xp

    @property
    def has_counts(self) -> bool:
        return self.treated_n is not None


class ObservationalData(_Frozen):
    """Joint P(X, Y | c) over the four cells, optionally with the cell counts behind it"""
    p_xy: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    p_xyp: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    p_xpy: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    p_xpyp: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    n_xy: Optional[int] = Field(default=None, ge=0)
    n_xyp: Optional[int] = Field(default=None, ge=0)
    n_xpy: Optional[int] = Field(default=None, ge=0)
    n_xpyp: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_cells(self) -> "ObservationalData":
        total = self.p_xy + self.p_xyp + self.p_xpy + self.p_xpyp
        if abs(total - 1.0) > Config.CELL_SUM_TOLERANCE:
            raise ValueError(f"observational cells sum to {total!r}, expected 1")
        counts = self.counts
        if all(c is None for c in counts):
            return self
        if any(c is None for c in counts):
            raise ValueError("either all four cell counts are given or none")
        n = sum(counts)
        if n == 0:
            raise ValueError("cell counts must not all be zero")
        if self.probabilities != tuple(c / n for c in counts):
            raise ValueError("probabilities do not equal the count ratios")
        return self

    @property
    def probabilities(self) -> Tuple[float, float, float, float]:
        return (self.p_xy, self.p_xyp, self.p_xpy, self.p_xpyp)

    @property
    def counts(self) -> Tuple[Optional[int], ...]:
        return (self.n_xy, self.n_xyp, self.n_xpy, self.n_xpyp)

    @property
    def has_counts(self) -> bool:
        return self.n_xy is not None

    @property
    def p_y(self) -> Probability:
        """P(y|c)"""
        return self.p_xy + self.p_xpy

    @property
    def p_x(self) -> Probability:
        """P(x|c)"""
        return self.p_xy + self.p_xyp


class GroupData(_Frozen):
    """One population group c with its data"""
    id: str = Field(min_length=1)
    experimental: ExperimentalData
    observational: Optional[ObservationalData] = None


class Study(_Frozen):
    """A benefit vector plus the ordered groups to compare"""
    benefit_vector: BenefitVector
    groups: List[GroupData] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique_ids(self) -> "Study":
        seen = set()
        for group in self.groups:
            if group.id in seen:
                raise ValueError(f"duplicate group id {group.id!r}")
            seen.add(group.id)
        return self

    def with_benefit_vector(self, bv: BenefitVector) -> "Study":
        return Study(benefit_vector=bv, groups=list(self.groups))


class CompatibilityReport(_Frozen):
    """Whether experimental and observational data can come from one model"""
    compatible: bool
    l: float
    u: float
    violations: List[str] = Field(default_factory=list)


# ===========================================
# BOUNDS & HEURISTICS
# ===========================================


class BenefitBounds(_Frozen):
    """Interval on the benefit function plus the quantities it was built from"""
    lower: float
    upper: float
    sigma: float
    w: float
    l: float
    u: float
    point_identified: bool

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0

    def contains(self, value: float, tolerance: float = 0.0) -> bool:
        return self.lower - tolerance <= value <= self.upper + tolerance


class ABHeuristic(_Frozen):
    """Score a*P(y_x|c) - b*P(y_x'|c)"""
    a: float = Field(allow_inf_nan=False)
    b: float = Field(allow_inf_nan=False)


class ResponseTypeInterval(_Frozen):
    lower: float
    upper: float


# ===========================================
# ORACLE
# ===========================================


class ResponseTypeDistribution(_Frozen):
    """P(complier), P(always-taker), P(never-taker), P(defier) within one group"""
    complier: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    always_taker: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    never_taker: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    defier: Probability = Field(ge=0.0, le=1.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _sums_to_one(self) -> "ResponseTypeDistribution":
        total = sum(self.as_tuple())
        if abs(total - 1.0) > Config.CELL_SUM_TOLERANCE:
            raise ValueError(f"response types sum to {total!r}, expected 1")
        return self

    @classmethod
    def from_tuple(cls, values: Tuple[float, float, float, float]) -> "ResponseTypeDistribution":
        return cls(**dict(zip(RESPONSE_TYPES, values)))

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.complier, self.always_taker, self.never_taker, self.defier)


class GroundTruth(_Frozen):
    """
    Joint distribution over response type x natural treatment choice.

    `joint` is ordered as JOINT_CELLS: (complier|x, complier|x', always_taker|x,
    always_taker|x', never_taker|x, never_taker|x', defier|x, defier|x').
    """
    joint: Tuple[float, float, float, float, float, float, float, float]

    @model_validator(mode="after")
    def _valid_joint(self) -> "GroundTruth":
        for name, cell in zip(JOINT_CELLS, self.joint):
            if not (math.isfinite(cell) and 0.0 <= cell <= 1.0):
                raise ValueError(f"cell {name} = {cell!r} is not a probability")
        total = sum(self.joint)
        if abs(total - 1.0) > Config.CELL_SUM_TOLERANCE:
            raise ValueError(f"joint cells sum to {total!r}, expected 1")
        return self

    @classmethod
    def from_response_types(
        cls,
        rt: ResponseTypeDistribution,
        natural_choice_given_type: Optional[Tuple[float, float, float, float]] = None,
    ) -> "GroundTruth":
        """
        Build a joint from type shares and P(natural choice = x | type).

        Args:
            rt: Response-type distribution
            natural_choice_given_type: Probability of choosing x per type, in
                RESPONSE_TYPES order; 0.5 for every type when omitted
        """
        if natural_choice_given_type is None:
            natural_choice_given_type = (Config.DEFAULT_NATURAL_CHOICE,) * 4
        joint: List[float] = []
        for share, q in zip(rt.as_tuple(), natural_choice_given_type):
            if not (0.0 <= q <= 1.0):
                raise ValueError(f"natural choice probability {q!r} outside [0, 1]")
            joint.extend((share * q, share - share * q))
        return cls(joint=tuple(joint))

    def cell(self, rtype: str, natural: str) -> float:
        return self.joint[JOINT_CELLS.index(f"{rtype}|{natural}")]

    @property
    def response_types(self) -> ResponseTypeDistribution:
        # cells may sum to 1 + CELL_SUM_TOLERANCE
        j = self.joint
        return ResponseTypeDistribution(
            complier=min(1.0, j[0] + j[1]),
            always_taker=min(1.0, j[2] + j[3]),
            never_taker=min(1.0, j[4] + j[5]),
            defier=min(1.0, j[6] + j[7]),
        )


class BruteForceRange(NamedTuple):
    minimum: float
    maximum: float
    n_feasible: int


# ===========================================
# SIMULATION
# ===========================================


class SimulatedGroup(_Frozen):
    id: str = Field(min_length=1)
    truth: GroundTruth


class SimulationConfig(_Frozen):
    n_per_arm: int = Field(ge=1)
    n_observational: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    groups: List[SimulatedGroup] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique_ids(self) -> "SimulationConfig":
        ids = [g.id for g in self.groups]
        if len(ids) != len(set(ids)):
            raise ValueError("simulated group ids must be unique")
        return self


class ExperimentCounts(NamedTuple):
    treated_n: int
    treated_y: int
    control_n: int
    control_y: int


class ObservationalCounts(NamedTuple):
    n_xy: int
    n_xyp: int
    n_xpy: int
    n_xpyp: int


# ===========================================
# REPORTS
# ===========================================


class RankingEntry(BaseModel):
    group_id: str
    estimate: float
    bounds: BenefitBounds


class GroupBoundsRow(BaseModel):
    group_id: str
    compatible: bool
    violations: List[str] = Field(default_factory=list)
    sigma: float
    w: float
    l: Optional[float] = None
    u: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    estimate: Optional[float] = None
    point_identified: bool = False
    point_estimate: Optional[float] = None
    gain_equality: bool
    ab_expressible: bool
    ab_heuristic: Optional[ABHeuristic] = None
    response_type_bounds: Optional[Dict[str, ResponseTypeInterval]] = None
    rank: Optional[int] = None


class BoundsReport(BaseModel):
    command: str = "bounds"
    benefit_vector: BenefitVector
    estimator: str
    groups: List[GroupBoundsRow]
    ranking: List[RankingEntry]
    incompatible_groups: List[str] = Field(default_factory=list)


class CompareRow(BaseModel):
    group_id: str
    heuristic_value: float
    heuristic_decision: bool
    compatible: bool
    violations: List[str] = Field(default_factory=list)
    lower: Optional[float] = None
    upper: Optional[float] = None
    estimate: Optional[float] = None
    benefit_decision: Optional[bool] = None
    disagreement: bool = False


class CompareReport(BaseModel):
    command: str = "compare"
    benefit_vector: BenefitVector
    heuristic: ABHeuristic
    benefit_gap: Dict[str, float]  # study payoff minus the heuristic's induced payoff, per type
    estimator: str
    threshold: float
    groups: List[CompareRow]
    disagreements: int
    incompatible_groups: List[str] = Field(default_factory=list)


class VerifyRow(BaseModel):
    group_id: str
    verdict: Verdict
    closed_form: Optional[BenefitBounds] = None
    brute_force_min: Optional[float] = None
    brute_force_max: Optional[float] = None
    n_feasible: int = 0
    max_deviation: Optional[float] = None
    tolerance: float
    violations: List[str] = Field(default_factory=list)
    message: str = ""


class VerifyReport(BaseModel):
    command: str = "verify"
    benefit_vector: BenefitVector
    grid_step: float
    match_tolerance: float
    groups: List[VerifyRow]
    failures: int


class DecomposeReport(BaseModel):
    command: str = "decompose"
    benefit_vector: BenefitVector
    sigma: float
    gain_equality: bool
    identified_from_experiments: bool
    ab_heuristic: Optional[ABHeuristic] = None
    response_type_weights: Dict[str, float]
    point_estimate_formula: Optional[Dict[str, float]] = None


# ===========================================
# VERIFICATION WORKFLOW STATE
# ===========================================


class VerificationState(TypedDict, total=False):
    """LangGraph state for verifying one group"""
    group_id: str
    benefit_vector: BenefitVector
    experimental: ExperimentalData
    observational: Optional[ObservationalData]
    grid_step: float
    match_tolerance: float
    workers: int
    compatibility: CompatibilityReport
    closed_form: BenefitBounds
    brute_force: BruteForceRange
    tolerance: float
    max_deviation: float
    verdict: Verdict
    message: str
