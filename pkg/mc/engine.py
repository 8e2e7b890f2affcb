"""
Tail counting engine

One pass over reps: every draw of W is located on the x-grid by binary
search and the per-block histograms are turned into counts of W > x and
W < -x for every grid point. Blocks carry their own streams (see
common.streams), so counts depend on (seed, reps, block_size, first_block)
only, never on the number of lanes.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from common.errors import ConfigError
from common.protocol import Record
from common.streams import RNG_ID
from .blocks import run_blocks

logger = logging.getLogger("mdtk.mc")

Z95 = float(norm.ppf(0.975))
SEED_MAX = 2 ** 64


@dataclass
class ExperimentConfig(Record):
    x_grid: tuple
    reps: int
    seed: int
    lanes: int = 1
    block_size: int = 16384
    first_block: int = 0
    model_ref: str = ""
    progress: bool = False
    rng_id: str = field(default=RNG_ID)

    def __post_init__(self):
        self.x_grid = tuple(float(x) for x in self.x_grid)
        if not self.x_grid:
            raise ConfigError("x grid is empty")
        if any(not math.isfinite(x) or x < 0 for x in self.x_grid):
            raise ConfigError(f"x grid entries must be finite and >= 0: {self.x_grid}")
        if any(b <= a for a, b in zip(self.x_grid, self.x_grid[1:])):
            raise ConfigError(f"x grid must be strictly increasing: {self.x_grid}")
        if self.reps < 1:
            raise ConfigError(f"reps must be at least 1, got {self.reps}")
        if self.lanes < 1:
            raise ConfigError(f"lanes must be at least 1, got {self.lanes}")
        if self.block_size < 1:
            raise ConfigError(f"block size must be at least 1, got {self.block_size}")
        if not (0 <= self.seed < SEED_MAX):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def wilson_interval(count: int, n: int, z: float = Z95) -> tuple:
    """Wilson score interval for count successes out of n trials"""
    if n <= 0:
        return (0.0, 1.0)
    p = count / n
    denom = 1.0 + z ** 2 / n
    center = (p + z ** 2 / (2.0 * n)) / denom
    margin = z * math.sqrt(p * (1.0 - p) / n + z ** 2 / (4.0 * n ** 2)) / denom
    return (max(0.0, center - margin), min(1.0, center + margin))


@dataclass
class TailEstimate(Record):
    x: float
    count_right: int        # W > x
    count_left: int         # W < -x
    reps: int
    p_right: float
    p_left: float
    ci_right: tuple
    ci_left: tuple

    @classmethod
    def from_counts(cls, x: float, right: int, left: int, reps: int, z: float = Z95) -> "TailEstimate":
        return cls(x, int(right), int(left), int(reps), right / reps, left / reps,
                   wilson_interval(right, reps, z), wilson_interval(left, reps, z))


def exceedance_counts(w: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """counts[j] = #(w > grid[j])"""
    slot = np.searchsorted(grid, w, side="left")      # grid points strictly below w
    hist = np.bincount(slot, minlength=grid.size + 1)
    return np.cumsum(hist[::-1])[::-1][1:].astype(np.int64)


def tail_counts(sampler, config: ExperimentConfig) -> tuple:
    """(right, left) int64 count arrays over the grid"""
    grid = np.asarray(config.x_grid)

    def block(rng, size):
        w = sampler.sample(rng, size)
        return exceedance_counts(w, grid), exceedance_counts(-w, grid)

    parts = run_blocks(block, config.reps, config.seed, config.block_size, config.lanes,
                       config.first_block, config.progress, desc=config.model_ref or "tails")
    right = np.zeros(grid.size, dtype=np.int64)
    left = np.zeros(grid.size, dtype=np.int64)
    for r, l in parts:
        right += r
        left += l
    return right, left


def estimate_tails(sampler, config: ExperimentConfig) -> list:
    logger.info(f"Estimating tails of {config.model_ref or 'W'}: reps={config.reps} seed={config.seed} "
                f"lanes={config.lanes} grid={list(config.x_grid)}")
    right, left = tail_counts(sampler, config)
    return [TailEstimate.from_counts(x, r, l, config.reps) for x, r, l in zip(config.x_grid, right, left)]


def merge_estimates(first: list, second: list) -> list:
    """Combine two runs over the same grid by adding counts"""
    out = []
    for a, b in zip(first, second):
        if a.x != b.x:
            raise ConfigError(f"grids differ: {a.x} vs {b.x}")
        out.append(TailEstimate.from_counts(a.x, a.count_right + b.count_right, a.count_left + b.count_left,
                                            a.reps + b.reps))
    return out
