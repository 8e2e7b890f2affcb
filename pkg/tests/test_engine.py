import math

import numpy as np
import pytest

from applications import KRunsSpec, build_kruns, iid_model
from common.errors import ConfigError
from common.streams import RNG_ID, block_sizes, iter_blocks
from localstat import BaseVariableSpec, ModelSampler
from mc import (ExperimentConfig, estimate_tails, tail_counts, merge_estimates, wilson_interval, run_blocks,
                relative_error_table, row_record, to_csv, to_json, parse_csv, CSV_COLUMNS, mgf_check,
                rademacher_log_mgf, iid_log_mgf)
from mc.engine import exceedance_counts


@pytest.fixture
def rademacher16():
    return ModelSampler(iid_model(16, BaseVariableSpec.rademacher()))


def test_exceedance_counts_are_strict():
    w = np.array([0.0, 1.0, 2.0, 2.0, 3.0])
    assert exceedance_counts(w, np.array([0.0, 2.0])).tolist() == [4, 1]
    assert exceedance_counts(-w, np.array([0.0, 2.0])).tolist() == [0, 0]


def test_wilson_interval():
    lo, hi = wilson_interval(0, 10)
    assert lo == pytest.approx(0.0, abs=1e-12)
    assert hi == pytest.approx(0.2775, abs=1e-4)
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    flipped = wilson_interval(70, 100)
    assert flipped == pytest.approx((1 - hi, 1 - lo))
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_block_layout():
    assert block_sizes(10, 4) == [4, 4, 2]
    assert list(iter_blocks(10, 4, first_block=3)) == [(3, 4), (4, 4), (5, 2)]


@pytest.mark.parametrize("kwargs", [
    {"x_grid": []},
    {"x_grid": [1.0, 0.5]},
    {"x_grid": [-1.0]},
    {"x_grid": [float("nan")]},
    {"reps": 0},
    {"lanes": 0},
    {"block_size": 0},
    {"seed": -1},
])
def test_experiment_config_validation(kwargs):
    base = {"x_grid": [1.0, 2.0], "reps": 100, "seed": 1}
    with pytest.raises(ConfigError):
        ExperimentConfig(**{**base, **kwargs})


def test_experiment_config_defaults():
    cfg = ExperimentConfig(x_grid=[1, 2], reps=10, seed=3)
    assert cfg.x_grid == (1.0, 2.0)
    assert cfg.rng_id == RNG_ID
    assert cfg.to_dict()["reps"] == 10


def test_counts_do_not_depend_on_lanes(rademacher16):
    cfg = dict(x_grid=[0.0, 1.0, 2.0], reps=20_000, seed=42, block_size=1500)
    one = tail_counts(rademacher16, ExperimentConfig(**cfg, lanes=1))
    four = tail_counts(rademacher16, ExperimentConfig(**cfg, lanes=4))
    assert one[0].tolist() == four[0].tolist()
    assert one[1].tolist() == four[1].tolist()


def test_runs_are_deterministic(rademacher16):
    cfg = ExperimentConfig(x_grid=[0.5, 1.5], reps=5000, seed=7, block_size=1000)
    assert [e.to_dict() for e in estimate_tails(rademacher16, cfg)] == \
           [e.to_dict() for e in estimate_tails(rademacher16, cfg)]
    other = ExperimentConfig(x_grid=[0.5, 1.5], reps=5000, seed=8, block_size=1000)
    assert estimate_tails(rademacher16, cfg)[0].count_right != estimate_tails(rademacher16, other)[0].count_right


def test_continuation_run_merges_exactly(rademacher16):
    grid = [0.0, 1.0, 2.5]
    whole = estimate_tails(rademacher16, ExperimentConfig(x_grid=grid, reps=8000, seed=5, block_size=1000))
    first = estimate_tails(rademacher16, ExperimentConfig(x_grid=grid, reps=4000, seed=5, block_size=1000))
    second = estimate_tails(rademacher16, ExperimentConfig(x_grid=grid, reps=4000, seed=5, block_size=1000,
                                                           first_block=4))
    assert [e.to_dict() for e in merge_estimates(first, second)] == [e.to_dict() for e in whole]
    with pytest.raises(ConfigError):
        merge_estimates(first, estimate_tails(rademacher16, ExperimentConfig(x_grid=[0.1], reps=10, seed=5)))


def test_run_blocks_keeps_block_order():
    results = run_blocks(lambda rng, size: (size, float(rng.random())), 10, seed=1, block_size=3, lanes=3)
    assert [r[0] for r in results] == [3, 3, 3, 1]
    again = run_blocks(lambda rng, size: (size, float(rng.random())), 10, seed=1, block_size=3, lanes=1)
    assert results == again


def test_symmetric_statistic_tails_balance(rademacher16):
    est = estimate_tails(rademacher16, ExperimentConfig(x_grid=[1.0], reps=40_000, seed=11, block_size=5000))[0]
    assert est.p_right == pytest.approx(est.p_left, abs=0.01)
    assert est.ci_right[0] <= est.p_right <= est.ci_right[1]


def test_relative_error_at_zero(rademacher16):
    estimates = estimate_tails(rademacher16, ExperimentConfig(x_grid=[0.0, 1.0], reps=2000, seed=3, block_size=500))
    rows = relative_error_table(estimates, gamma=0.0)
    assert rows[0].R_N == estimates[0].p_right / 0.5 - 1.0
    assert rows[0].L_N == estimates[0].p_left / 0.5 - 1.0
    # gamma = 0 makes the skew ratios the normal ones
    assert rows[1].R_skew == rows[1].R_N
    assert rows[1].half_widths["R_N"] > 0


def test_csv_and_json_records(rademacher16):
    estimates = estimate_tails(rademacher16, ExperimentConfig(x_grid=[0.5, 1.0], reps=1000, seed=2, block_size=500))
    records = [row_record(r, 1000, 2, 1, RNG_ID) for r in relative_error_table(estimates, gamma=0.1)]
    text = to_csv(records)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    parsed = parse_csv(text)
    assert parsed[1]["x"] == 1.0
    assert parsed[1]["reps"] == 1000 and parsed[1]["rng_id"] == RNG_ID
    assert parsed[0]["R_skew"] == records[0]["R_skew"]
    assert '"L_skew"' in to_json(records)


def test_mgf_matches_rademacher_closed_form(rademacher16):
    ts = [0.0, 0.5, 1.0]
    report = mgf_check(rademacher16, ts, reps=100_000, seed=4, gamma=0.0, block_size=10_000, bootstrap=50)
    assert report.rows[0].log_mgf == 0.0 and report.rows[0].se == 0.0
    for row in report.rows[1:]:
        exact = rademacher_log_mgf(16, row.t)
        assert row.se > 0
        assert row.log_mgf == pytest.approx(exact, abs=5 * row.se + 1e-3)
        assert row.target == pytest.approx(row.t ** 2 / 2)


def test_iid_log_mgf_reduces_to_rademacher():
    for t in (0.25, 1.0, 2.0):
        assert iid_log_mgf(9, BaseVariableSpec.rademacher(), t) == pytest.approx(rademacher_log_mgf(9, t), rel=1e-12)
    assert math.isclose(rademacher_log_mgf(4, 0.0), 0.0)


def test_rademacher_closed_form_near_gaussian():
    assert abs(rademacher_log_mgf(400, 1.0) - 0.5) <= 1e-3


@pytest.mark.slow
def test_kruns_mgf_at_one():
    stat = build_kruns(KRunsSpec(1500, 2, 0.25))
    report = mgf_check(stat.sampler, [1.0], reps=1_000_000, seed=1, gamma=stat.moments.gamma, lanes=4)
    assert abs(report.rows[0].discrepancy) <= 0.05
