"""
Monte Carlo moments
Streams power sums of W per block; plug-in standard errors from higher moments
"""

import logging
import math

import numpy as np

from common.errors import DomainError
from common.protocol import MomentMethod
from mc.blocks import run_blocks
from .summary import MomentSummary

logger = logging.getLogger("mdtk.moments")

MIN_REPS = 1000
DEFAULT_BLOCK = 16384


def _power_sums(sampler):
    def block(rng, size):
        w = sampler.sample(rng, size)
        powers = np.cumprod(np.broadcast_to(w, (6, w.size)), axis=0)
        return powers.sum(axis=1)
    return block


def moments_mc(sampler, reps: int, seed: int, lanes: int = 1, scale: float = 1.0,
               block_size: int = DEFAULT_BLOCK, first_block: int = 0, progress: bool = False) -> MomentSummary:
    """
    Sample Var(W) and gamma = E W^3.

    gamma is the raw third moment, not the central one.
    se(var) = sqrt((mu4 - mu2^2) / reps) with central sample moments mu_k,
    se(gamma) = sqrt((m6 - m3^2) / reps) with raw sample moments m_k.
    """
    if reps < MIN_REPS:
        raise DomainError(f"Monte Carlo moments need at least {MIN_REPS} reps, got {reps}")
    parts = run_blocks(_power_sums(sampler), reps, seed, block_size, lanes, first_block, progress, desc="moments")
    raw = [math.fsum(float(p[k]) for p in parts) / reps for k in range(6)]
    mean = raw[0]
    # central moments from raw moments: mu_k = sum_j C(k,j) raw_j (-mean)^(k-j)
    central = [0.0] * 5
    for k in (2, 4):
        terms = [math.comb(k, j) * (raw[j - 1] if j else 1.0) * (-mean) ** (k - j) for j in range(k + 1)]
        central[k] = math.fsum(terms)
    mu2, mu4 = central[2], central[4]
    gamma = raw[2]
    var_W = max(mu2, 0.0)
    se_var = math.sqrt(max(mu4 - mu2 ** 2, 0.0) / reps)
    se_gamma = math.sqrt(max(raw[5] - gamma ** 2, 0.0) / reps)
    logger.info(f"MC moments over {reps} reps: var={var_W:.6g} (se {se_var:.2g}) gamma={gamma:.6g} (se {se_gamma:.2g})")
    return MomentSummary(sigma2=scale ** 2 * var_W, var_W=var_W, gamma=gamma,
                         method=MomentMethod.MONTE_CARLO, std_errors=(se_var, se_gamma),
                         notes=[f"mean {mean:.3e} over {reps} reps, seed {seed}"])
