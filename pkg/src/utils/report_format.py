"""
Table rendering of report objects

Tables are drawn from the same report models that are serialized as JSON, so
both formats always show the same numbers.

Created: 2026-10-18
"""

from typing import List, Optional, Sequence

from pydantic import BaseModel

from src.schemas import BoundsReport, CompareReport, DecomposeReport, VerifyReport
from src.utils.result_saver import report_to_json


def _num(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "-"
    text = f"{value:.{digits}g}"
    # -0 from rounding noise
    return "0" if text == "-0" else text


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "-"
    return "yes" if value else "no"


def _table(headers: Sequence[str], rows: List[Sequence[str]]) -> List[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    rule = "  ".join("-" * w for w in widths)
    body = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return [line.rstrip(), rule] + body


def _vector_line(report: BaseModel) -> str:
    bv = report.benefit_vector
    return (
        f"Benefit vector: complier={_num(bv.beta)} always_taker={_num(bv.gamma)} "
        f"never_taker={_num(bv.theta)} defier={_num(bv.delta)}"
    )


def render_bounds(report: BoundsReport) -> str:
    lines = [_vector_line(report), f"Estimator: {report.estimator}", ""]
    rows = []
    for g in report.groups:
        rows.append([
            g.group_id,
            _num(g.sigma),
            _num(g.w),
            _num(g.l),
            _num(g.u),
            f"[{_num(g.lower)}, {_num(g.upper)}]" if g.compatible else "INCOMPATIBLE",
            _num(g.estimate),
            _flag(g.point_identified),
            _flag(g.gain_equality),
            _flag(g.ab_expressible),
            str(g.rank) if g.rank is not None else "-",
        ])
    lines += _table(
        ["group", "sigma", "W", "L", "U", "bounds", "estimate", "point", "gain_eq", "A/B", "rank"],
        rows,
    )

    if report.ranking:
        lines += ["", "Ranking: " + " > ".join(entry.group_id for entry in report.ranking)]
    for g in report.groups:
        if not g.compatible:
            lines.append(f"! {g.group_id}: incompatible data")
            lines += [f"    {v}" for v in g.violations]
    return "\n".join(lines)


def render_compare(report: CompareReport) -> str:
    h = report.heuristic
    lines = [
        _vector_line(report),
        f"Heuristic: {_num(h.a)}*P(y_x) - {_num(h.b)}*P(y_x')   "
        f"estimator: {report.estimator}   threshold: {_num(report.threshold)}",
        "",
    ]
    rows = []
    for g in report.groups:
        rows.append([
            g.group_id,
            _num(g.heuristic_value),
            "treat" if g.heuristic_decision else "skip",
            f"[{_num(g.lower)}, {_num(g.upper)}]" if g.compatible else "INCOMPATIBLE",
            _num(g.estimate),
            "-" if g.benefit_decision is None else ("treat" if g.benefit_decision else "skip"),
            "DISAGREE" if g.disagreement else "",
        ])
    lines += _table(
        ["group", "heuristic", "decision", "benefit bounds", "estimate", "decision", ""],
        rows,
    )
    lines += ["", f"Disagreements: {report.disagreements} of {len(report.groups)} group(s)"]
    return "\n".join(lines)


def render_verify(report: VerifyReport) -> str:
    lines = [
        _vector_line(report),
        f"Grid step: {_num(report.grid_step)}   match tolerance: {_num(report.match_tolerance)}",
        "",
    ]
    rows = []
    for g in report.groups:
        closed = g.closed_form
        rows.append([
            g.group_id,
            f"[{_num(closed.lower)}, {_num(closed.upper)}]" if closed else "-",
            f"[{_num(g.brute_force_min)}, {_num(g.brute_force_max)}]" if g.brute_force_min is not None else "-",
            str(g.n_feasible),
            _num(g.max_deviation, 3),
            _num(g.tolerance, 3),
            g.verdict,
        ])
    lines += _table(
        ["group", "closed form", "brute force", "points", "max dev", "tolerance", "verdict"],
        rows,
    )
    for g in report.groups:
        if g.message:
            lines.append(f"! {g.group_id}: {g.message}")
    lines += ["", f"Failures: {report.failures} of {len(report.groups)} group(s)"]
    return "\n".join(lines)


def render_decompose(report: DecomposeReport) -> str:
    lines = [
        _vector_line(report),
        f"sigma = {_num(report.sigma)}",
        f"Gain equality: {_flag(report.gain_equality)}",
        f"Identified from experiments alone: {_flag(report.identified_from_experiments)}",
    ]
    if report.ab_heuristic is not None:
        lines.append(
            f"A/B representation: {_num(report.ab_heuristic.a)}*P(y_x) - {_num(report.ab_heuristic.b)}*P(y_x')"
        )
    else:
        lines.append("A/B representation: none")
    lines.append("Response-type weights:")
    lines += [f"  {rtype:<13} {_num(weight)}" for rtype, weight in report.response_type_weights.items()]
    if report.point_estimate_formula is not None:
        c = report.point_estimate_formula
        lines.append(
            f"Point formula: {_num(c['p_y_do_x'])}*P(y_x) + {_num(c['p_y_do_xp'])}*P(y_x') + {_num(c['constant'])}"
        )
    return "\n".join(lines)


_RENDERERS = {
    "bounds": render_bounds,
    "compare": render_compare,
    "verify": render_verify,
    "decompose": render_decompose,
}


def render(report: BaseModel, fmt: str) -> str:
    """Report as 'table' or 'json' text"""
    if fmt == "json":
        return report_to_json(report)
    return _RENDERERS[report.command](report)
