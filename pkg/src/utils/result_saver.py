"""
Result Saver - Save reports and simulated studies to JSON files
Created: 2026-10-18
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel

from src.config import Config


def ensure_results_directory(output_dir: Optional[str] = None) -> Path:
    """Ensure results directory exists"""
    results_dir = Path(output_dir) if output_dir else Path(Config.RESULTS_DIR)
    results_dir.mkdir(parents=True, exist_ok=True)
    return results_dir


def report_to_json(report: BaseModel) -> str:
    """
    Serialize a report model.

    Floats are written with Python's shortest round-trip repr, so parsing the
    output gives back the identical doubles.
    """
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False)


def save_report_to_json(
    report: BaseModel,
    output_dir: Optional[str] = None,
    label: Optional[str] = None,
) -> str:
    """
    Save a report to a timestamped JSON file

    Args:
        report: BoundsReport, CompareReport, VerifyReport or DecomposeReport
        output_dir: Target directory (Config.RESULTS_DIR when None)
        label: Optional tag added to the filename, e.g. the study file stem

    Returns:
        Path to saved JSON file
    """
    results_dir = ensure_results_directory(output_dir)
    command = getattr(report, "command", "report")

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    stem = f"unitselect_{command}_{label}" if label else f"unitselect_{command}"
    filepath = results_dir / f"{stem}_{timestamp}.json"

    result_data = {
        "metadata": {
            "command": command,
            "timestamp": datetime.now().isoformat(),
        },
        "report": report.model_dump(mode="json"),
    }

    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(result_data, f, indent=2, ensure_ascii=False)

    return str(filepath)


def study_document_text(study_data: Dict[str, Any]) -> str:
    """
    Text of a study document.

    No timestamps or other run-dependent values are added, so the same
    document always produces the same bytes.
    """
    return json.dumps(study_data, indent=2, ensure_ascii=False) + "\n"


def write_study_file(study_data: Dict[str, Any], path: str) -> str:
    """Write a study document as UTF-8 JSON"""
    filepath = Path(path)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        f.write(study_document_text(study_data))
    return str(filepath)
