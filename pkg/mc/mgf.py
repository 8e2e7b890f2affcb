"""
Moment generating function check
log E exp(tW) against t^2/2 + gamma t^3/6, with block-bootstrap standard errors
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from common.protocol import Record
from localstat.base import BaseVariableSpec
from .blocks import run_blocks

logger = logging.getLogger("mdtk.mc")

# spawn key of the bootstrap stream, outside the range of block keys
BOOTSTRAP_KEY = 2 ** 62


@dataclass
class MgfRow(Record):
    t: float
    log_mgf: float
    target: float           # t^2/2 + gamma t^3/6
    discrepancy: float
    se: float


@dataclass
class MgfReport(Record):
    gamma: float
    reps: int
    seed: int
    rows: list = field(default_factory=list)

    def max_abs_discrepancy(self) -> float:
        return max(abs(r.discrepancy) for r in self.rows)


def mgf_check(sampler, t_grid, reps: int, seed: int, gamma: float, lanes: int = 1, block_size: int = 16384,
              bootstrap: int = 200, progress: bool = False) -> MgfReport:
    """
    Each block keeps, per t, its shift max(tW) and the shifted sum of
    exp(tW - shift); blocks are then combined in log space.
    """
    ts = np.asarray(list(t_grid), dtype=np.float64)

    def block(rng, size):
        tw = np.outer(ts, sampler.sample(rng, size))
        shift = tw.max(axis=1)
        return np.log(np.exp(tw - shift[:, None]).sum(axis=1)) + shift, size

    parts = run_blocks(block, reps, seed, block_size, lanes, progress=progress, desc="mgf")
    logs = np.stack([p[0] for p in parts])          # (blocks, len(t))
    sizes = np.asarray([p[1] for p in parts], dtype=np.float64)
    log_mgf = logsumexp(logs, axis=0) - math.log(reps)

    boot_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(BOOTSTRAP_KEY,))))
    replicates = np.empty((bootstrap, ts.size))
    for b in range(bootstrap):
        idx = boot_rng.integers(0, len(parts), size=len(parts))
        replicates[b] = logsumexp(logs[idx], axis=0) - math.log(sizes[idx].sum())
    se = replicates.std(axis=0, ddof=1) if bootstrap > 1 else np.zeros(ts.size)

    report = MgfReport(gamma=gamma, reps=reps, seed=seed)
    for t, value, s in zip(ts.tolist(), log_mgf.tolist(), se.tolist()):
        target = t ** 2 / 2.0 + gamma * t ** 3 / 6.0
        if t == 0.0:
            value, s = 0.0, 0.0
        report.rows.append(MgfRow(t, value, target, value - target, s))
    logger.info(f"MGF check over {reps} reps: max |discrepancy| = {report.max_abs_discrepancy():.3g}")
    return report


def iid_log_mgf(n: int, base: BaseVariableSpec, t: float) -> float:
    """Exact log E exp(tW) for the standardized i.i.d. sum"""
    sd = math.sqrt(base.variance)
    exponents = t * (base.values - base.mean) / (sd * math.sqrt(n))
    return n * float(logsumexp(exponents, b=np.asarray(base.probs)))


def rademacher_log_mgf(n: int, t: float) -> float:
    """n log cosh(t / sqrt(n))"""
    return n * math.log(math.cosh(t / math.sqrt(n)))
