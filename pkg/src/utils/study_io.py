"""
Study and truth file formats

Strict pydantic schemas for the JSON documents the CLI reads and writes, and
their conversion to engine values. Every failure is raised as StudyFileError
naming the JSON path of the offending value, e.g.
`groups[0].experimental.counts.treated_y`.

Created: 2026-10-18
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, model_validator

from src.engine.model import experimental_from_counts, observational_from_counts
from src.errors import InvalidCounts, StudyFileError
from src.schemas import (
    BenefitVector,
    ExperimentalData,
    GroundTruth,
    GroupData,
    ObservationalData,
    ResponseTypeDistribution,
    SimulatedGroup,
    Study,
)

T = TypeVar("T")


class _FileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _exactly_one(block: BaseModel, first: str, second: str) -> None:
    given = [name for name in (first, second) if getattr(block, name) is not None]
    if len(given) != 1:
        raise ValueError(f"exactly one of '{first}' or '{second}' is required")


# ===========================================
# STUDY FILE
# ===========================================


class BenefitVectorBlock(_FileModel):
    complier: float = Field(allow_inf_nan=False)
    always_taker: float = Field(allow_inf_nan=False)
    never_taker: float = Field(allow_inf_nan=False)
    defier: float = Field(allow_inf_nan=False)

    def to_domain(self) -> BenefitVector:
        return BenefitVector(
            beta=self.complier,
            gamma=self.always_taker,
            theta=self.never_taker,
            delta=self.defier,
        )


class ExperimentalProbabilities(_FileModel):
    p_y_do_x: float = Field(allow_inf_nan=False)
    p_y_do_xp: float = Field(allow_inf_nan=False)


class ExperimentalCountsBlock(_FileModel):
    treated_n: StrictInt = Field(ge=0)
    treated_y: StrictInt = Field(ge=0)
    control_n: StrictInt = Field(ge=0)
    control_y: StrictInt = Field(ge=0)


class ExperimentalBlock(_FileModel):
    probabilities: Optional[ExperimentalProbabilities] = None
    counts: Optional[ExperimentalCountsBlock] = None

    @model_validator(mode="after")
    def _one_form(self) -> "ExperimentalBlock":
        _exactly_one(self, "probabilities", "counts")
        return self


class ObservationalCells(_FileModel):
    xy: float = Field(allow_inf_nan=False)
    xyp: float = Field(allow_inf_nan=False)
    xpy: float = Field(allow_inf_nan=False)
    xpyp: float = Field(allow_inf_nan=False)


class ObservationalCountsBlock(_FileModel):
    xy: StrictInt = Field(ge=0)
    xyp: StrictInt = Field(ge=0)
    xpy: StrictInt = Field(ge=0)
    xpyp: StrictInt = Field(ge=0)


class ObservationalBlock(_FileModel):
    probabilities: Optional[ObservationalCells] = None
    counts: Optional[ObservationalCountsBlock] = None

    @model_validator(mode="after")
    def _one_form(self) -> "ObservationalBlock":
        _exactly_one(self, "probabilities", "counts")
        return self


class GroupBlock(_FileModel):
    id: str = Field(min_length=1)
    experimental: ExperimentalBlock
    observational: Optional[ObservationalBlock] = None


class StudyFile(_FileModel):
    """Top-level study document"""
    benefit_vector: BenefitVectorBlock
    groups: List[GroupBlock] = Field(min_length=1)
    metadata: Optional[Dict[str, Any]] = None


# ===========================================
# TRUTH FILE
# ===========================================


class ResponseTypesBlock(_FileModel):
    complier: float = Field(allow_inf_nan=False)
    always_taker: float = Field(allow_inf_nan=False)
    never_taker: float = Field(allow_inf_nan=False)
    defier: float = Field(allow_inf_nan=False)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.complier, self.always_taker, self.never_taker, self.defier)


class NaturalChoiceSplit(_FileModel):
    """Mass of one response type split by natural choice x / x'"""
    x: float = Field(allow_inf_nan=False)
    xp: float = Field(allow_inf_nan=False)


class JointBlock(_FileModel):
    complier: NaturalChoiceSplit
    always_taker: NaturalChoiceSplit
    never_taker: NaturalChoiceSplit
    defier: NaturalChoiceSplit

    def as_tuple(self) -> Tuple[float, ...]:
        cells: List[float] = []
        for split in (self.complier, self.always_taker, self.never_taker, self.defier):
            cells.extend((split.x, split.xp))
        return tuple(cells)


class TruthGroupBlock(_FileModel):
    id: str = Field(min_length=1)
    response_types: Optional[ResponseTypesBlock] = None
    natural_choice_given_type: Optional[ResponseTypesBlock] = None
    joint: Optional[JointBlock] = None

    @model_validator(mode="after")
    def _one_form(self) -> "TruthGroupBlock":
        _exactly_one(self, "response_types", "joint")
        if self.joint is not None and self.natural_choice_given_type is not None:
            raise ValueError("'natural_choice_given_type' only applies to 'response_types'")
        return self


class TruthFile(_FileModel):
    """Ground truths for `simulate`; the optional benefit vector is copied into the study"""
    benefit_vector: Optional[BenefitVectorBlock] = None
    groups: List[TruthGroupBlock] = Field(min_length=1)


# ===========================================
# ERROR PATHS
# ===========================================


def json_path(loc: Tuple[Any, ...]) -> str:
    """('groups', 0, 'experimental') -> 'groups[0].experimental'"""
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "$"


def _first_error(e: ValidationError, prefix: str = "") -> StudyFileError:
    error = e.errors()[0]
    loc = json_path(error["loc"]) if error["loc"] else ""
    if prefix and loc:
        path = f"{prefix}.{loc}"
    else:
        path = prefix or loc or "$"
    message = error["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return StudyFileError(path, message)


def _at(path: str, build: Callable[[], T]) -> T:
    """Run a domain constructor, reporting failures at `path`"""
    try:
        return build()
    except ValidationError as e:
        raise _first_error(e, path) from e
    except (InvalidCounts, ValueError) as e:
        raise StudyFileError(path, str(e)) from e


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise StudyFileError("", f"cannot read {path}: {getattr(e, 'strerror', None) or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StudyFileError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def _validate(model: type, data: Any) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise _first_error(e) from e


# ===========================================
# STUDY CONVERSION
# ===========================================


def _experimental(block: ExperimentalBlock, path: str) -> ExperimentalData:
    if block.counts is not None:
        c = block.counts
        return _at(
            f"{path}.counts",
            lambda: experimental_from_counts(c.treated_n, c.treated_y, c.control_n, c.control_y),
        )
    p = block.probabilities
    return _at(
        f"{path}.probabilities",
        lambda: ExperimentalData(p_y_do_x=p.p_y_do_x, p_y_do_xp=p.p_y_do_xp),
    )


def _observational(block: ObservationalBlock, path: str) -> ObservationalData:
    if block.counts is not None:
        c = block.counts
        return _at(f"{path}.counts", lambda: observational_from_counts(c.xy, c.xyp, c.xpy, c.xpyp))
    p = block.probabilities
    return _at(
        f"{path}.probabilities",
        lambda: ObservationalData(p_xy=p.xy, p_xyp=p.xyp, p_xpy=p.xpy, p_xpyp=p.xpyp),
    )


def study_from_dict(data: Any) -> Study:
    """Validate a parsed study document and build the Study"""
    doc: StudyFile = _validate(StudyFile, data)
    bv = _at("benefit_vector", doc.benefit_vector.to_domain)

    groups = []
    for i, block in enumerate(doc.groups):
        path = f"groups[{i}]"
        experimental = _experimental(block.experimental, f"{path}.experimental")
        observational = (
            _observational(block.observational, f"{path}.observational")
            if block.observational is not None
            else None
        )
        groups.append(GroupData(id=block.id, experimental=experimental, observational=observational))

    return _at("groups", lambda: Study(benefit_vector=bv, groups=groups))


def load_study(path: str) -> Study:
    """
    Read a study file.

    Raises:
        StudyFileError: unreadable file, invalid JSON or schema violation
    """
    return study_from_dict(_read_json(path))


def study_to_dict(study: Study, metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Study document for a Study.

    Data that carry counts are written as counts so no precision is lost;
    everything else as probabilities.
    """
    groups = []
    for group in study.groups:
        exp = group.experimental
        if exp.has_counts:
            experimental = {"counts": {
                "treated_n": exp.treated_n,
                "treated_y": exp.treated_y,
                "control_n": exp.control_n,
                "control_y": exp.control_y,
            }}
        else:
            experimental = {"probabilities": {"p_y_do_x": exp.p_y_do_x, "p_y_do_xp": exp.p_y_do_xp}}

        entry: Dict[str, Any] = {"id": group.id, "experimental": experimental}

        obs = group.observational
        if obs is not None:
            keys = ("xy", "xyp", "xpy", "xpyp")
            values = obs.counts if obs.has_counts else obs.probabilities
            form = "counts" if obs.has_counts else "probabilities"
            entry["observational"] = {form: dict(zip(keys, values))}

        groups.append(entry)

    document: Dict[str, Any] = {
        "benefit_vector": study.benefit_vector.as_dict(),
        "groups": groups,
    }
    if metadata is not None:
        document["metadata"] = metadata
    return document


# ===========================================
# TRUTH CONVERSION
# ===========================================


def _truth(block: TruthGroupBlock, path: str) -> GroundTruth:
    if block.joint is not None:
        cells = block.joint.as_tuple()
        return _at(f"{path}.joint", lambda: GroundTruth(joint=cells))

    rt = _at(
        f"{path}.response_types",
        lambda: ResponseTypeDistribution.from_tuple(block.response_types.as_tuple()),
    )
    choice = block.natural_choice_given_type.as_tuple() if block.natural_choice_given_type else None
    return _at(
        f"{path}.natural_choice_given_type" if choice else f"{path}.response_types",
        lambda: GroundTruth.from_response_types(rt, choice),
    )


def truth_from_dict(data: Any) -> Tuple[List[SimulatedGroup], Optional[BenefitVector]]:
    """Validate a parsed truth document; returns its groups and optional benefit vector"""
    doc: TruthFile = _validate(TruthFile, data)
    bv = _at("benefit_vector", doc.benefit_vector.to_domain) if doc.benefit_vector else None

    seen = set()
    groups = []
    for i, block in enumerate(doc.groups):
        path = f"groups[{i}]"
        if block.id in seen:
            raise StudyFileError(f"{path}.id", f"duplicate group id {block.id!r}")
        seen.add(block.id)
        groups.append(SimulatedGroup(id=block.id, truth=_truth(block, path)))
    return groups, bv


def load_truth(path: str) -> Tuple[List[SimulatedGroup], Optional[BenefitVector]]:
    """
    Read a truth file.

    Raises:
        StudyFileError: unreadable file, invalid JSON or schema violation
    """
    return truth_from_dict(_read_json(path))
