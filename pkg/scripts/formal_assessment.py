"""
Formal Assessment Script
Run bounds (and optionally verification) over every study file and save the
reports to a dedicated directory
Created: 2026-10-18
"""

import sys
import os
import argparse
from pathlib import Path
from datetime import datetime
from typing import List

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config import Config
from src.errors import UnitSelectionError
from src.main import run_bounds, run_verify
from src.utils.report_format import render
from src.utils.result_saver import save_report_to_json
from src.utils.study_io import load_study
from tqdm import tqdm

# Truth files share the directory but are simulation inputs
TRUTH_PATTERN = "*_truth*.json"


def formal_assessment(
    inputs_dir: str = "evaluation_inputs",
    pattern: str = "*.json",
    estimator: str = Config.DEFAULT_ESTIMATOR,
    verify: bool = False,
    grid_step: float = Config.DEFAULT_GRID_STEP,
) -> List[dict]:
    """
    Run the bounds pipeline on every study file and save the reports

    Args:
        inputs_dir: Directory containing study files
        pattern: File pattern to match (default: "*.json")
        estimator: midpoint, lower or upper
        verify: Also run the brute-force verification
        grid_step: Grid step for verification

    Returns:
        One summary dict per study file
    """
    timestamp = datetime.now().strftime("%Y%m%d")
    formal_dir = Path(Config.RESULTS_DIR) / f"formal_assessment_{timestamp}"
    formal_dir.mkdir(parents=True, exist_ok=True)

    print("=" * 80)
    print("🎯 FORMAL ASSESSMENT - Benefit Bounds per Study")
    print("=" * 80)
    print(f"📁 Output Directory: {formal_dir}")
    print()

    inputs_path = Path(inputs_dir)
    if not inputs_path.exists():
        print(f"❌ Directory not found: {inputs_dir}")
        return []

    truth_files = set(inputs_path.glob(TRUTH_PATTERN))
    input_files = sorted(f for f in inputs_path.glob(pattern) if f not in truth_files)
    if not input_files:
        print(f"⚠️  No study files found matching pattern: {pattern}")
        return []

    print(f"📋 Found {len(input_files)} study file(s):")
    for f in input_files:
        print(f"   - {f.name}")
    print()

    results = []
    for input_file in tqdm(input_files, desc="Processing Studies", unit="study", ncols=80, leave=False):
        summary = {"file": input_file.name, "status": "success"}
        try:
            study = load_study(str(input_file))
            report = run_bounds(study, estimator=estimator)
            summary["bounds_report"] = save_report_to_json(report, str(formal_dir), label=input_file.stem)
            summary["ranking"] = [entry.group_id for entry in report.ranking]
            summary["incompatible_groups"] = report.incompatible_groups

            print(f"\n{'=' * 80}")
            print(f"📄 {input_file.name}")
            print(render(report, "table"))

            if verify:
                verification = run_verify(study, grid_step=grid_step)
                summary["verify_report"] = save_report_to_json(verification, str(formal_dir), label=input_file.stem)
                summary["verification_failures"] = verification.failures
                print()
                print(render(verification, "table"))

        except (UnitSelectionError, ValueError) as e:
            summary["status"] = "error"
            summary["error"] = str(e)
            print(f"\n❌ {input_file.name}: {e}")

        results.append(summary)

    print(f"\n{'=' * 80}")
    print("📊 FORMAL ASSESSMENT SUMMARY")
    print("=" * 80)
    ok = sum(1 for r in results if r["status"] == "success")
    print(f"✅ Successful: {ok}/{len(results)}")
    for r in results:
        if r["status"] != "success":
            print(f"❌ {r['file']}: {r['error']}")
        elif r["incompatible_groups"]:
            print(f"⚠️  {r['file']}: incompatible groups {', '.join(r['incompatible_groups'])}")
        if r.get("verification_failures"):
            print(f"⚠️  {r['file']}: {r['verification_failures']} verification failure(s)")

    return results


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run bounds over every study file")
    parser.add_argument("--inputs-dir", default="evaluation_inputs")
    parser.add_argument("--pattern", default="*.json")
    parser.add_argument("--estimator", choices=Config.ESTIMATORS, default=Config.DEFAULT_ESTIMATOR)
    parser.add_argument("--verify", action="store_true", help="Also run brute-force verification")
    parser.add_argument("--grid-step", type=float, default=Config.DEFAULT_GRID_STEP)
    args = parser.parse_args()

    formal_assessment(
        inputs_dir=args.inputs_dir,
        pattern=args.pattern,
        estimator=args.estimator,
        verify=args.verify,
        grid_step=args.grid_step,
    )
