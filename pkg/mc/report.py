"""
Relative-error tables and their CSV / JSON forms

L_N    = P(W < -x) / Phi(-x) - 1
L_skew = P(W < -x) / (Phi(-x) exp(-gamma x^3 / 6)) - 1
R_N    = P(W > x) / (1 - Phi(x)) - 1
R_skew = P(W > x) / ((1 - Phi(x)) exp(gamma x^3 / 6)) - 1
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

from common.errors import DomainError
from common.protocol import Record, format_real
from tails.approx import normal_tail, skew_corrected_tail

CSV_COLUMNS = ["x", "p_left", "p_right", "ci_left_lo", "ci_left_hi", "ci_right_lo", "ci_right_hi",
               "L_N", "L_skew", "R_N", "R_skew", "gamma", "reps", "seed", "lanes", "rng_id"]
INT_COLUMNS = {"reps", "seed", "lanes"}


@dataclass
class RelativeErrorRow(Record):
    x: float
    p_left: float
    p_right: float
    ci_left: tuple
    ci_right: tuple
    L_N: float
    L_skew: float
    R_N: float
    R_skew: float
    gamma: float
    half_widths: dict = field(default_factory=dict)   # 95% half-width per ratio


def _ratio(p: float, ci: tuple, approx: float) -> tuple:
    return p / approx - 1.0, (ci[1] - ci[0]) / 2.0 / approx


def relative_error_table(estimates, gamma: float) -> list:
    if not math.isfinite(gamma):
        raise DomainError(f"gamma must be finite, got {gamma}")
    rows = []
    for est in estimates:
        normal = normal_tail(est.x)
        L_N, hw_L_N = _ratio(est.p_left, est.ci_left, normal)
        L_skew, hw_L_skew = _ratio(est.p_left, est.ci_left, skew_corrected_tail(est.x, -gamma))
        R_N, hw_R_N = _ratio(est.p_right, est.ci_right, normal)
        R_skew, hw_R_skew = _ratio(est.p_right, est.ci_right, skew_corrected_tail(est.x, gamma))
        rows.append(RelativeErrorRow(
            x=est.x, p_left=est.p_left, p_right=est.p_right, ci_left=est.ci_left, ci_right=est.ci_right,
            L_N=L_N, L_skew=L_skew, R_N=R_N, R_skew=R_skew, gamma=gamma,
            half_widths={"L_N": hw_L_N, "L_skew": hw_L_skew, "R_N": hw_R_N, "R_skew": hw_R_skew},
        ))
    return rows


def row_record(row: RelativeErrorRow, reps: int, seed: int, lanes: int, rng_id: str) -> dict:
    """Flat record keyed by CSV_COLUMNS"""
    return {
        "x": row.x, "p_left": row.p_left, "p_right": row.p_right,
        "ci_left_lo": row.ci_left[0], "ci_left_hi": row.ci_left[1],
        "ci_right_lo": row.ci_right[0], "ci_right_hi": row.ci_right[1],
        "L_N": row.L_N, "L_skew": row.L_skew, "R_N": row.R_N, "R_skew": row.R_skew,
        "gamma": row.gamma, "reps": int(reps), "seed": int(seed), "lanes": int(lanes), "rng_id": rng_id,
    }


def _cell(key: str, value) -> str:
    if key in INT_COLUMNS or isinstance(value, (str, bool)) or value is None:
        return "" if value is None else str(value)
    return format_real(value)


def to_csv(records: list, columns: list = None) -> str:
    columns = columns or CSV_COLUMNS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_cell(c, rec.get(c)) for c in columns])
    return buf.getvalue()


def to_json(records: list, columns: list = None) -> str:
    """Same field names as the CSV; floats keep their shortest round-trip repr"""
    columns = columns or CSV_COLUMNS
    return json.dumps([{c: rec.get(c) for c in columns} for rec in records], ensure_ascii=False, indent=2) + "\n"


def parse_csv(text: str) -> list:
    """Read records written by to_csv back into python values"""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, value in rec.items():
            if key in INT_COLUMNS:
                parsed[key] = int(value)
            elif key == "rng_id" or key.startswith("ok_") or value == "":
                parsed[key] = value
            else:
                parsed[key] = float(value)
        rows.append(parsed)
    return rows
