"""
Brute-force distribution of W for tiny models

Every base configuration is visited in mixed-radix order (last variable
fastest), in chunks. Configuration probabilities are products taken in log
space; chunk partials are combined with math.fsum per atom.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from common.errors import UnsupportedSizeError
from common.protocol import Side
from localstat.model import LocalStatisticModel

logger = logging.getLogger("mdtk.oracle")

ORACLE_LIMIT = 1 << 24
ATOM_TOL = 1e-12
CHUNK = 1 << 16


@dataclass
class ExactDistribution:
    values: np.ndarray      # strictly increasing atoms
    probs: np.ndarray

    @property
    def atoms(self) -> list:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    @property
    def total_prob(self) -> float:
        return math.fsum(self.probs.tolist())

    def __len__(self):
        return self.values.size


def configuration_count(model: LocalStatisticModel) -> int:
    total = 1
    for spec in model.base:
        total *= spec.size
    return total


def _chunk_atoms(model: LocalStatisticModel, codes: np.ndarray, strides: list):
    X = np.empty((codes.size, model.m))
    logp = np.zeros(codes.size)
    for a, spec in enumerate(model.base):
        digit = (codes // strides[a]) % spec.size
        X[:, a] = spec.values[digit]
        logp += spec.log_probs[digit]
    w = model.w_from_base(X)
    order = np.argsort(w, kind="stable")
    w, p = w[order], np.exp(logp[order])
    starts = np.flatnonzero(np.concatenate(([True], np.diff(w) > 0)))
    return w[starts], np.add.reduceat(p, starts)


def _merge(values: np.ndarray, parts: np.ndarray, tol: float) -> ExactDistribution:
    order = np.argsort(values, kind="stable")
    values, parts = values[order], parts[order]
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    bounds = np.concatenate(([0], breaks, [values.size]))
    atoms = values[bounds[:-1]]
    probs = np.array([math.fsum(parts[a:b].tolist()) for a, b in zip(bounds[:-1], bounds[1:])])
    return ExactDistribution(atoms, probs)


def exact_distribution(model: LocalStatisticModel, limit: int = ORACLE_LIMIT, reverse: bool = False,
                       tol: float = ATOM_TOL) -> ExactDistribution:
    """
    Args:
        reverse: visit configurations in the opposite order (cross-checks)
    """
    total = configuration_count(model)
    if total > limit:
        raise UnsupportedSizeError(f"{total} base configurations exceed the oracle limit {limit}")
    strides = [1] * model.m
    for a in range(model.m - 2, -1, -1):
        strides[a] = strides[a + 1] * model.base[a + 1].size
    starts = list(range(0, total, CHUNK))
    if reverse:
        starts.reverse()
    values, parts = [], []
    for start in starts:
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        if reverse:
            codes = codes[::-1]
        v, p = _chunk_atoms(model, codes, strides)
        values.append(v)
        parts.append(p)
    dist = _merge(np.concatenate(values), np.concatenate(parts), tol)
    logger.debug(f"Oracle for {model.name}: {total} configurations, {len(dist)} atoms")
    return dist


def exact_tail(dist: ExactDistribution, x: float, side: Side = Side.RIGHT, tol: float = ATOM_TOL) -> float:
    """P(W > x) or P(W < -x); atoms within tol of the threshold are excluded"""
    if Side(side) == Side.RIGHT:
        mask = dist.values > x + tol
    else:
        mask = dist.values < -x - tol
    return math.fsum(dist.probs[mask].tolist())


def exact_moments(dist: ExactDistribution) -> tuple:
    """(mean, variance, third central moment, fourth central moment)"""
    p = dist.probs
    mean = math.fsum((p * dist.values).tolist())
    centered = dist.values - mean
    return (mean,) + tuple(math.fsum((p * centered ** k).tolist()) for k in (2, 3, 4))


def exact_cdf(dist: ExactDistribution, x: float) -> float:
    """P(W <= x), atoms within the merge tolerance of x included"""
    return math.fsum(dist.probs[dist.values <= x + ATOM_TOL].tolist())
