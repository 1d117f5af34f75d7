"""
Command-line interface

    unitselect bounds    --input STUDY.json [--estimator midpoint|lower|upper]
    unitselect compare   --input STUDY.json --ab A,B
    unitselect simulate  --truth TRUTH.json --n-per-arm N [--n-obs M] [--seed S] [--exact] [--out PATH]
    unitselect verify    --input STUDY.json [--grid-step G]
    unitselect decompose (--ab A,B | --benefit-vector B,G,T,D | --preset NAME)

Reports go to stdout, diagnostics to stderr. Exit codes: 0 success, 1 input
error, 2 analytic failure (incompatible data, verification failure, no
feasible grid point).

Created: 2026-10-18
"""

import argparse
import math
import sys
from typing import List, Optional, Sequence

from src.config import Config
from src.engine.heuristics import induced_benefit_vector
from src.errors import InvalidCounts, StudyFileError, UnitSelectionError
from src.main import run_bounds, run_compare, run_decompose, run_simulate, run_verify
from src.schemas import ABHeuristic, BenefitVector, Study
from src.utils.logger import StudyLogger
from src.utils.report_format import render
from src.utils.result_saver import save_report_to_json, study_document_text, write_study_file
from src.utils.study_io import load_study, load_truth

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_ANALYTIC_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the input-error code"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _floats(text: str, count: int, what: str) -> List[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated numbers, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be numbers, got {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"{what} must be finite, got {text!r}")
    return values


def parse_ab(text: str) -> ABHeuristic:
    a, b = _floats(text, 2, "--ab")
    return ABHeuristic(a=a, b=b)


def parse_benefit_vector(text: str) -> BenefitVector:
    return BenefitVector.from_tuple(tuple(_floats(text, 4, "--benefit-vector")))


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = _nonnegative_int(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {value}")
    return value


def _grid_step(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (0.0 < value <= Config.MAX_GRID_STEP):
        raise argparse.ArgumentTypeError(f"grid step must lie in (0, {Config.MAX_GRID_STEP}], got {value}")
    return value


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (math.isfinite(value) and value >= 0.0):
        raise argparse.ArgumentTypeError(f"expected a finite nonnegative number, got {value}")
    return value


def _add_vector_overrides(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--preset", choices=Config.preset_names(),
                       help="Use a named benefit vector instead of the file's")
    group.add_argument("--benefit-vector", type=parse_benefit_vector, metavar="B,G,T,D",
                       help="Payoffs for complier, always-taker, never-taker, defier")


def _add_output_options(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=Config.OUTPUT_FORMATS, default=None,
                        help="Report format (default: $UNITSELECT_FORMAT or table)")
    parser.add_argument("--save-dir", default=None,
                        help="Also save the JSON report to a timestamped file in this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="unitselect",
        description="Unit selection with benefit-function bounds from experimental and observational data",
    )
    parser.add_argument("--log-dir", default=Config.LOG_DIR,
                        help="Write a timestamped log file to this directory")
    commands = parser.add_subparsers(dest="command", required=True)

    bounds = commands.add_parser("bounds", help="Bounds, estimates and ranking for every group")
    bounds.add_argument("--input", required=True, help="Study file (JSON)")
    bounds.add_argument("--estimator", choices=Config.ESTIMATORS, default=Config.DEFAULT_ESTIMATOR)
    _add_vector_overrides(bounds)
    _add_output_options(bounds)

    compare = commands.add_parser("compare", help="Audit an A/B heuristic against the benefit bounds")
    compare.add_argument("--input", required=True, help="Study file (JSON)")
    compare.add_argument("--ab", required=True, type=parse_ab, metavar="A,B",
                         help="Heuristic a*P(y_x) - b*P(y_x')")
    compare.add_argument("--estimator", choices=Config.ESTIMATORS, default=Config.DEFAULT_ESTIMATOR)
    _add_vector_overrides(compare)
    _add_output_options(compare)

    simulate = commands.add_parser("simulate", help="Simulate a study from ground truths")
    simulate.add_argument("--truth", required=True, help="Truth file (JSON)")
    simulate.add_argument("--n-per-arm", required=True, type=_positive_int)
    simulate.add_argument("--n-obs", type=_nonnegative_int, default=0,
                          help="Observational sample size (0: no observational data)")
    simulate.add_argument("--seed", type=_seed, default=0)
    simulate.add_argument("--exact", action="store_true",
                          help="Write rounded expected counts instead of sampling")
    simulate.add_argument("--out", default=None, help="Study file to write (default: stdout)")
    simulate.add_argument("--workers", type=_positive_int, default=1)
    _add_vector_overrides(simulate)

    verify = commands.add_parser("verify", help="Check closed-form bounds against a brute-force grid")
    verify.add_argument("--input", required=True, help="Study file (JSON)")
    verify.add_argument("--grid-step", type=_grid_step, default=Config.DEFAULT_GRID_STEP)
    verify.add_argument("--match-tolerance", type=_tolerance, default=None,
                        help="Allowed deviation of grid data from the study data (default: grid step)")
    verify.add_argument("--workers", type=_positive_int, default=1)
    _add_vector_overrides(verify)
    _add_output_options(verify)

    decompose = commands.add_parser("decompose", help="Split a benefit vector or heuristic over response types")
    source = decompose.add_mutually_exclusive_group(required=True)
    source.add_argument("--ab", type=parse_ab, metavar="A,B")
    source.add_argument("--benefit-vector", type=parse_benefit_vector, metavar="B,G,T,D")
    source.add_argument("--preset", choices=Config.preset_names())
    decompose.add_argument("--format", choices=Config.OUTPUT_FORMATS, default=None)

    return parser


def _override_vector(args: argparse.Namespace) -> Optional[BenefitVector]:
    if getattr(args, "benefit_vector", None) is not None:
        return args.benefit_vector
    if getattr(args, "preset", None):
        return BenefitVector.from_tuple(Config.BENEFIT_VECTOR_PRESETS[args.preset])
    return None


def _load(args: argparse.Namespace) -> Study:
    study = load_study(args.input)
    bv = _override_vector(args)
    return study.with_benefit_vector(bv) if bv is not None else study


def _emit(report, args: argparse.Namespace) -> Optional[str]:
    fmt = args.format or Config.default_format()
    print(render(report, fmt))
    if getattr(args, "save_dir", None):
        return save_report_to_json(report, args.save_dir)
    return None


def _cmd_bounds(args, logger: StudyLogger) -> int:
    report = run_bounds(_load(args), estimator=args.estimator, logger=logger)
    saved = _emit(report, args)
    code = EXIT_ANALYTIC_FAILURE if report.incompatible_groups else EXIT_OK
    logger.log_completion(code, saved)
    return code


def _cmd_compare(args, logger: StudyLogger) -> int:
    report = run_compare(_load(args), args.ab, estimator=args.estimator, logger=logger)
    saved = _emit(report, args)
    logger.logger.info(f"{report.disagreements} disagreement(s)")
    code = EXIT_ANALYTIC_FAILURE if report.incompatible_groups else EXIT_OK
    logger.log_completion(code, saved)
    return code


def _cmd_verify(args, logger: StudyLogger) -> int:
    report = run_verify(
        _load(args),
        grid_step=args.grid_step,
        match_tolerance=args.match_tolerance,
        workers=args.workers,
        logger=logger,
    )
    saved = _emit(report, args)
    code = EXIT_ANALYTIC_FAILURE if report.failures else EXIT_OK
    logger.log_completion(code, saved)
    return code


def _cmd_simulate(args, logger: StudyLogger) -> int:
    groups, file_bv = load_truth(args.truth)
    bv = _override_vector(args) or file_bv
    if bv is None:
        raise StudyFileError(
            "benefit_vector",
            "the truth file has no benefit vector; add one or pass --preset / --benefit-vector",
        )

    study, document = run_simulate(
        groups,
        bv,
        n_per_arm=args.n_per_arm,
        n_observational=args.n_obs,
        seed=args.seed,
        exact=args.exact,
        workers=args.workers,
    )
    for group_id in document["metadata"]["incompatible_groups"]:
        logger.logger.warning(f"[{group_id}] simulated sample is incompatible (L > U)")

    if args.out:
        try:
            path = write_study_file(document, args.out)
        except OSError as e:
            raise StudyFileError("", f"cannot write {args.out}: {e}") from e
        logger.log_simulation(len(study.groups), args.seed, args.exact, path)
    else:
        sys.stdout.write(study_document_text(document))
        logger.log_simulation(len(study.groups), args.seed, args.exact, "stdout")

    logger.log_completion(EXIT_OK)
    return EXIT_OK


def _cmd_decompose(args, logger: StudyLogger) -> int:
    heuristic = args.ab
    if heuristic is not None:
        bv = induced_benefit_vector(heuristic)
    else:
        bv = _override_vector(args)
    report = run_decompose(bv, heuristic)
    print(render(report, args.format or Config.default_format()))
    return EXIT_OK


_COMMANDS = {
    "bounds": _cmd_bounds,
    "compare": _cmd_compare,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "decompose": _cmd_decompose,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logger = StudyLogger(args.command, log_dir=args.log_dir)
    logger.log_start(getattr(args, "input", None) or getattr(args, "truth", None) or "-")

    try:
        return _COMMANDS[args.command](args, logger)
    except (StudyFileError, InvalidCounts) as e:
        logger.log_error(e, "input")
        return EXIT_INPUT_ERROR
    except UnitSelectionError as e:
        logger.log_error(e, args.command)
        return EXIT_ANALYTIC_FAILURE
    except ValueError as e:
        # includes pydantic ValidationError and oversized grids
        logger.log_error(e, "input")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
