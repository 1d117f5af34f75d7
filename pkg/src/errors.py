"""
Exception hierarchy for the unit selection engine
Created: 2026-10-18
"""

from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from src.schemas import CompatibilityReport


class UnitSelectionError(Exception):
    """Base class for all engine errors"""


class InvalidCounts(UnitSelectionError, ValueError):
    """Arm or cell counts cannot be turned into probabilities"""


class IncompatibleData(UnitSelectionError):
    """Experimental and observational data admit no model (L > U)"""

    def __init__(
        self,
        message: str,
        group_id: Optional[str] = None,
        report: Optional["CompatibilityReport"] = None,
    ):
        if group_id is not None:
            message = f"group {group_id!r}: {message}"
        super().__init__(message)
        self.group_id = group_id
        self.report = report


class NoFeasiblePoint(UnitSelectionError):
    """The simplex grid holds no ground truth matching the data"""


class StudyFileError(UnitSelectionError):
    """A study or truth file failed to load; `path` names the JSON location"""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message
