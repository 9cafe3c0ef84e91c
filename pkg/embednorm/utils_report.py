import json
import math
from typing import Iterable, List, Optional

from .schemas import BoundReport

REPORT_FIELDS = (
    "scheme",
    "s",
    "p",
    "lower_bound",
    "lower_bound_simple",
    "exact",
    "upper_bound",
    "method",
    "iterations",
    "residual",
)
CSV_FIELDS = ("s", "p", "lower_bound", "lower_bound_simple", "upper_bound", "exact", "method")


def _p_value(p: float):
    return "inf" if math.isinf(p) else p


def report_dict(report: BoundReport) -> dict:
    data = report.model_dump(include=set(REPORT_FIELDS))
    data["p"] = _p_value(report.p)
    return {key: data[key] for key in REPORT_FIELDS}


def render_json(report: BoundReport) -> str:
    return json.dumps(report_dict(report), indent=2)


def render_text(report: BoundReport) -> str:
    rows = dict(report_dict(report))
    rows["candidate"] = report.candidate
    rows["witness"] = report.witness_summary
    width = max(len(k) for k in rows)
    lines = []
    for key, value in rows.items():
        if value is None:
            shown = "-"
        elif isinstance(value, float):
            shown = format(value, ".12g")
        else:
            shown = str(value)
        lines.append(f"{key.ljust(width)}  {shown}")
    return "\n".join(lines)


# -------------------------------
# CSV
# -------------------------------
def csv_number(value: Optional[float]) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return format(value, ".17g")


def csv_header() -> str:
    return ",".join(CSV_FIELDS)


def csv_row(report: BoundReport) -> str:
    cells = [
        str(report.s),
        csv_number(report.p),
        csv_number(report.lower_bound),
        csv_number(report.lower_bound_simple),
        csv_number(report.upper_bound),
        csv_number(report.exact),
        report.method,
    ]
    return ",".join(cells)


def render_csv(reports: Iterable[BoundReport], summary: str | None = None) -> str:
    lines: List[str] = [csv_header()]
    lines.extend(csv_row(r) for r in reports)
    if summary:
        lines.append(summary)
    return "\n".join(lines)


def growth_summary(slope: Optional[float], growth: Optional[str], offset: float = 0.0) -> str:
    if slope is None:
        return "# growth: too few points to fit"
    shift = f" offset={csv_number(offset)}" if offset else ""
    return f"# growth: slope={slope:.6f} class={growth}{shift}"
