"""
Cross-validation suite: exact moments, tails and samplers against the oracle
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chisquare

from common.protocol import Record
from localstat.base import BaseVariableSpec
from localstat.enumeration import joint_support
from localstat.model import LocalStatisticModel, make_model
from localstat.sampling import ModelSampler
from localstat.summands import TableSummand
from mc.blocks import run_blocks
from moments.analytic import kruns_gamma_analytic
from moments.exact import variance_exact, gamma_exact
from tails.approx import standardized_poisson_tail
from .exact import exact_distribution, exact_moments

logger = logging.getLogger("mdtk.oracle")

MOMENT_TOL = 1e-9
CHI_SQUARE_LEVEL = 1e-4
MIN_EXPECTED = 5.0


def random_tiny_model(rng: np.random.Generator, max_n: int = 8, max_s: int = 3, max_m: int = 8,
                      name: str = "tiny") -> LocalStatisticModel:
    """Bernoulli bases, random index sets of size <= max_s, random centered tables"""
    m = int(rng.integers(2, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    base = tuple(BaseVariableSpec.bernoulli(float(rng.uniform(0.1, 0.9))) for _ in range(m))
    index_sets, tables, supports = [], [], []
    for _ in range(n):
        size = int(rng.integers(1, min(max_s, m) + 1))
        idx = np.sort(rng.choice(m, size=size, replace=False))
        values, probs = joint_support(base, idx)
        table = rng.normal(size=values.shape[0])
        table -= math.fsum((probs * table).tolist())
        index_sets.append(idx.tolist())
        tables.append(table)
        supports.append(tuple(base[a].values for a in idx))
    return make_model(base, index_sets, TableSummand(tables, supports), name=name)


def _nearest_atom(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    if values.size == 1:
        return np.zeros(w.size, dtype=np.int64)
    idx = np.clip(np.searchsorted(values, w), 1, values.size - 1)
    take_left = (w - values[idx - 1]) <= (values[idx] - w)
    return np.where(take_left, idx - 1, idx)


def chi_square_agreement(model: LocalStatisticModel, sampler=None, reps: int = 100_000, seed: int = 0,
                         block_size: int = 16384) -> float:
    """p-value of sampled W against the exact atoms; atoms with small expected counts are pooled"""
    dist = exact_distribution(model)
    sampler = sampler or ModelSampler(model)

    def block(rng, size):
        w = sampler.sample(rng, size)
        return np.bincount(_nearest_atom(dist.values, w), minlength=len(dist))

    observed = np.sum(run_blocks(block, reps, seed, block_size), axis=0).astype(np.float64)
    expected = dist.probs * reps
    small = expected < MIN_EXPECTED
    if small.any():
        observed = np.append(observed[~small], observed[small].sum())
        expected = np.append(expected[~small], expected[small].sum())
    expected *= observed.sum() / expected.sum()
    if observed.size < 2:
        return 1.0
    return float(chisquare(observed, expected).pvalue)


@dataclass
class CheckResult(Record):
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class OracleReport(Record):
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, **details):
        self.checks.append(CheckResult(name, bool(passed), details))
        if not passed:
            logger.warning(f"Oracle check failed: {name} {details}")

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["passed"] = self.passed
        return out


def _moment_check(report: OracleReport, name: str, model: LocalStatisticModel):
    _, var, third, _ = exact_moments(exact_distribution(model))
    v, g = variance_exact(model), gamma_exact(model)
    report.add(name, abs(v - var) <= MOMENT_TOL and abs(g - third) <= MOMENT_TOL,
               variance_exact=v, oracle_variance=var, gamma_exact=g, oracle_third=third)


def _sampler_check(report: OracleReport, name: str, stat, seed: int, reps: int = 2000, tol: float = 0.0):
    model_sampler = ModelSampler(stat.model)
    X = model_sampler.draw_base(np.random.default_rng(seed), reps)
    diff = float(np.max(np.abs(model_sampler.w_from_base(X) - stat.direct.w_from_base(X))))
    report.add(name, diff <= tol, max_difference=diff)


def run_oracle_check(seed: int = 0, trials: int = 50, chi_square_reps: int = 100_000) -> OracleReport:
    # builders pull in the moment layer; imported here to keep oracle importable on its own
    from applications.kruns import KRunsSpec, build_kruns
    from applications.subgraph import SubgraphSpec, build_subgraph
    from applications.ustat import UStatSpec, build_ustat

    report = OracleReport(seed=seed)
    rng = np.random.default_rng(seed)
    failures = 0
    for t in range(trials):
        model = random_tiny_model(rng, name=f"tiny-{t}")
        _, var, third, _ = exact_moments(exact_distribution(model))
        if abs(variance_exact(model) - var) > MOMENT_TOL or abs(gamma_exact(model) - third) > MOMENT_TOL:
            failures += 1
    report.add("random tiny models: exact moments match the oracle", failures == 0, trials=trials, failures=failures)

    kruns = build_kruns(KRunsSpec(6, 2, 0.3))
    _moment_check(report, "kruns(6,2,0.3): exact moments match the oracle", kruns.model)
    report.add("kruns(6,2,0.3): closed-form gamma matches enumeration",
               abs(kruns_gamma_analytic(6, 0.3) - gamma_exact(kruns.model)) <= MOMENT_TOL)

    triangle = build_subgraph(SubgraphSpec(5, 0.4, "triangle"))
    _moment_check(report, "triangle in G(5,0.4): exact moments match the oracle", triangle.model)

    poisson = standardized_poisson_tail(0.0, 1.0)
    report.add("standardized Poisson tail at (0, 1)", abs(poisson - (1.0 - 2.0 * math.exp(-1.0))) <= 1e-12,
               value=poisson)

    p_value = chi_square_agreement(kruns.model, kruns.direct, reps=chi_square_reps, seed=seed)
    report.add("kruns(6,2,0.3): sampled W agrees with the oracle", p_value >= CHI_SQUARE_LEVEL, p_value=p_value)

    _sampler_check(report, "kruns: direct sampler equals generic sampler", build_kruns(KRunsSpec(40, 3, 0.4)), seed)
    _sampler_check(report, "triangle: direct sampler equals generic sampler", triangle, seed)
    ustat = build_ustat(UStatSpec(8, 3, "product", BaseVariableSpec.bernoulli(0.3)))
    _sampler_check(report, "ustat: direct sampler equals generic sampler", ustat, seed, tol=1e-12)
    logger.info(f"Oracle check: {sum(c.passed for c in report.checks)}/{len(report.checks)} passed")
    return report
