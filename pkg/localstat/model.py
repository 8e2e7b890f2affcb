"""
Sums of local statistics

W = sum_i xi_i, where xi_i = (h_i(X restricted to I_i) - center_i) / scale and
the X_alpha are independent with finite support. Models are immutable once
built and are shared read-only by samplers and moment computations.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from common.errors import InvalidModelError, UnsupportedSizeError
from .base import BaseVariableSpec
from .enumeration import joint_support, DEFAULT_JOINT_LIMIT
from .summands import Summand

logger = logging.getLogger("mdtk.model")

CENTER_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LocalStatisticModel:
    base: tuple                       # m BaseVariableSpec
    index_sets: tuple                 # n sorted int arrays
    summand: Summand
    center: np.ndarray                # per-summand shift of the raw value
    scale: float = 1.0
    delta_bound: Optional[float] = None
    name: str = "model"

    def __post_init__(self):
        if self.scale <= 0 or not math.isfinite(self.scale):
            raise InvalidModelError(f"scale must be positive and finite, got {self.scale}")
        if self.center.shape != (len(self.index_sets),):
            raise InvalidModelError(f"center has shape {self.center.shape}, expected ({len(self.index_sets)},)")
        if self.delta_bound is not None and not (self.delta_bound > 0):
            raise InvalidModelError(f"delta bound must be positive, got {self.delta_bound}")
        check_index_sets(self.index_sets, len(self.base))

    @property
    def m(self) -> int:
        return len(self.base)

    @property
    def n(self) -> int:
        return len(self.index_sets)

    @cached_property
    def center_total(self) -> float:
        return math.fsum(self.center.tolist())

    def xi(self, i: int, values: np.ndarray) -> np.ndarray:
        """Value of xi_i given values of X restricted to I_i (last axis)"""
        return (self.summand.raw(i, values) - self.center[i]) / self.scale

    def raw_matrix(self, X: np.ndarray) -> np.ndarray:
        """(reps, m) base values -> (reps, n) raw summand values"""
        raw = np.empty((X.shape[0], self.n), dtype=np.float64)
        for i, idx in enumerate(self.index_sets):
            raw[:, i] = self.summand.raw(i, X[:, idx])
        return raw

    def w_from_base(self, X: np.ndarray) -> np.ndarray:
        """W for each row of base values"""
        return (self.raw_matrix(X).sum(axis=1) - self.center_total) / self.scale

    def normalized(self, scale: float, delta_bound: Optional[float] = None) -> "LocalStatisticModel":
        """Copy with a new scale; an asserted delta bound is rescaled unless given"""
        if delta_bound is None and self.delta_bound is not None:
            delta_bound = self.delta_bound * self.scale / scale
        return dataclasses.replace(self, scale=float(scale), delta_bound=delta_bound)

    def with_delta_bound(self, delta_bound: Optional[float]) -> "LocalStatisticModel":
        return dataclasses.replace(self, delta_bound=delta_bound)

    @cached_property
    def summand_extremes(self) -> tuple:
        """(max_i |E xi_i|, max_i sup |xi_i|) by enumeration of each joint support of I_i"""
        max_mean, max_abs = 0.0, 0.0
        for i, idx in enumerate(self.index_sets):
            values, probs = joint_support(self.base, idx, DEFAULT_JOINT_LIMIT)
            xi = self.xi(i, values)
            max_mean = max(max_mean, abs(math.fsum((probs * xi).tolist())))
            max_abs = max(max_abs, float(np.max(np.abs(xi))))
        return max_mean, max_abs

    def computed_delta(self) -> Optional[float]:
        """Enumerated max_i sup|xi_i|, or None when a joint support is too large"""
        try:
            return self.summand_extremes[1]
        except UnsupportedSizeError:
            return None

    def check_centered(self, tol: float = CENTER_TOL):
        """Raise unless E xi_i = 0 for every summand"""
        max_mean, _ = self.summand_extremes
        if max_mean > tol:
            raise InvalidModelError(f"summands are not centered: max |E xi_i| = {max_mean:.3e}")

    def describe(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "summand": self.summand.to_spec(),
            "scale": self.scale,
            "delta_bound": self.delta_bound,
        }


def check_index_sets(index_sets: Sequence, m: int):
    for i, idx in enumerate(index_sets):
        if len(idx) == 0:
            raise InvalidModelError(f"index set of summand {i} is empty")
        if idx[0] < 0 or idx[-1] >= m:
            raise InvalidModelError(f"index set of summand {i} leaves [0, {m}): {list(idx)}")
        if np.any(np.diff(idx) <= 0):
            raise InvalidModelError(f"index set of summand {i} is not strictly increasing: {list(idx)}")


def make_model(base, index_sets, summand: Summand, center=None, scale: float = 1.0,
               delta_bound: float = None, name: str = "model", check: bool = True) -> LocalStatisticModel:
    """
    Build a model from plain sequences.

    Args:
        base: one BaseVariableSpec per X_alpha
        index_sets: iterables of 0-based variable indices (sorted and deduplicated here)
        summand: raw evaluator
        center: per-summand shift, a scalar, or None for zeros
        check: verify E xi_i = 0 by enumeration
    """
    base = tuple(base)
    if not all(isinstance(b, BaseVariableSpec) for b in base):
        raise InvalidModelError("base must contain BaseVariableSpec entries")
    sets = []
    for i, idx in enumerate(index_sets):
        arr = np.unique(np.asarray(list(idx), dtype=np.int64))
        if arr.size == 0:
            raise InvalidModelError(f"index set of summand {i} is empty")
        arr.setflags(write=False)
        sets.append(arr)
    if center is None:
        center = np.zeros(len(sets))
    elif np.isscalar(center):
        center = np.full(len(sets), float(center))
    center = np.asarray(center, dtype=np.float64)
    center.setflags(write=False)
    model = LocalStatisticModel(base, tuple(sets), summand, center, float(scale), delta_bound, name)
    if check:
        model.check_centered()
    logger.debug(f"Built model {name}: m={model.m} n={model.n}")
    return model
