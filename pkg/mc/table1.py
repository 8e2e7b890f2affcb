"""
Relative errors of the 2-runs statistic (n=1500, p=0.25) against published values

Published values come from 10^6 repetitions with an unknown seed. Cells at
x = 3.5 and x = 4 rest on a handful of expected counts and are reported
without a tolerance check.
"""

import logging
from dataclasses import dataclass

from common.config import load_config
from common.protocol import Record
from applications.kruns import KRunsSpec, build_kruns
from .engine import ExperimentConfig, estimate_tails
from .report import CSV_COLUMNS, relative_error_table, row_record

logger = logging.getLogger("mdtk.mc")

RATIOS = ("L_N", "L_skew", "R_N", "R_skew")
# x -> (L_N, L_skew, R_N, R_skew)
PUBLISHED = {
    2.0: (-0.195, -0.032, 0.262, 0.050),
    2.5: (-0.238, 0.093, 0.344, -0.063),
    3.0: (-0.538, -0.138, 0.476, -0.208),
    3.5: (-0.811, -0.491, 1.201, -0.182),
    4.0: (-0.968, -0.862, 1.810, -0.358),
}
# absolute tolerances of the asserted cells; everything else is report-only
TOLERANCES = {
    2.0: {"L_N": 0.03, "L_skew": 0.03, "R_N": 0.03, "R_skew": 0.03},
    2.5: {"R_N": 0.05, "R_skew": 0.05},
    3.0: {"R_N": 0.12, "L_N": 0.12},
}
NOT_ASSERTED = "not asserted"
COMPARISON_COLUMNS = [f"published_{r}" for r in RATIOS] + [f"ok_{r}" for r in RATIOS]
TABLE1_COLUMNS = CSV_COLUMNS + COMPARISON_COLUMNS


@dataclass
class Table1Result(Record):
    gamma: float
    sigma2: float
    records: list
    failures: list


def compare_row(record: dict) -> dict:
    """Adds published values and a yes / no / not asserted flag per ratio"""
    x = record["x"]
    published = PUBLISHED.get(x)
    tolerances = TOLERANCES.get(x, {})
    out = dict(record)
    for pos, ratio in enumerate(RATIOS):
        out[f"published_{ratio}"] = None if published is None else published[pos]
        if published is None or ratio not in tolerances:
            out[f"ok_{ratio}"] = NOT_ASSERTED
        else:
            out[f"ok_{ratio}"] = "yes" if abs(record[ratio] - published[pos]) <= tolerances[ratio] else "no"
    return out


def run_table1(reps: int = None, seed: int = None, lanes: int = 1, x_grid=None, config: dict = None,
               progress: bool = False) -> Table1Result:
    config = config or load_config()
    settings = config["table1"]
    reps = reps or settings["reps"]
    seed = config["experiment"]["seed"] if seed is None else seed
    x_grid = x_grid or settings["x_grid"]

    stat = build_kruns(KRunsSpec(settings["n"], settings["k"], settings["p"]), config=config)
    gamma = stat.moments.gamma
    exp_config = ExperimentConfig(x_grid=x_grid, reps=reps, seed=seed, lanes=lanes,
                                  block_size=config["experiment"]["block_size"], model_ref=stat.name,
                                  progress=progress)
    estimates = estimate_tails(stat.sampler, exp_config)
    rows = relative_error_table(estimates, gamma)
    records = [compare_row(row_record(row, reps, seed, lanes, exp_config.rng_id)) for row in rows]
    failures = [f"x={r['x']} {ratio}" for r in records for ratio in RATIOS if r[f"ok_{ratio}"] == "no"]
    if failures:
        logger.warning(f"Cells outside tolerance: {failures}")
    return Table1Result(gamma=gamma, sigma2=stat.sigma2, records=records, failures=failures)
