"""
Base variable specifications
Finite-support distributions of the independent inputs X_alpha
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from common.errors import InvalidModelError

PROB_TOL = 1e-12


class BaseKind(str, Enum):
    BERNOULLI = "bernoulli"
    RADEMACHER = "rademacher"
    FINITE = "finite"


@dataclass(frozen=True, eq=False)
class BaseVariableSpec:
    kind: BaseKind
    support: tuple          # strictly increasing values
    probs: tuple
    p: float = None         # bernoulli only

    def __post_init__(self):
        if len(self.support) == 0 or len(self.support) != len(self.probs):
            raise InvalidModelError("support and probabilities must be nonempty and of equal length")
        if self.kind == BaseKind.BERNOULLI and not (0.0 < self.p < 1.0):
            raise InvalidModelError(f"bernoulli probability must lie in (0,1), got {self.p}")
        if any(not (q > 0.0) for q in self.probs):
            raise InvalidModelError(f"support probabilities must be positive: {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise InvalidModelError(f"support probabilities sum to {math.fsum(self.probs)!r}, not 1")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise InvalidModelError(f"support values must be distinct: {self.support}")

    @classmethod
    def bernoulli(cls, p: float) -> "BaseVariableSpec":
        p = float(p)
        if not (0.0 < p < 1.0):
            raise InvalidModelError(f"bernoulli probability must lie in (0,1), got {p}")
        return cls(BaseKind.BERNOULLI, (0.0, 1.0), (1.0 - p, p), p)

    @classmethod
    def rademacher(cls) -> "BaseVariableSpec":
        return cls(BaseKind.RADEMACHER, (-1.0, 1.0), (0.5, 0.5))

    @classmethod
    def finite(cls, pairs) -> "BaseVariableSpec":
        """pairs: iterable of (value, prob); equal values are merged"""
        merged = {}
        for value, prob in pairs:
            merged.setdefault(float(value), []).append(float(prob))
        values = sorted(merged)
        return cls(BaseKind.FINITE, tuple(values), tuple(math.fsum(merged[v]) for v in values))

    @classmethod
    def centered_bernoulli(cls, p: float) -> "BaseVariableSpec":
        p = float(p)
        if not (0.0 < p < 1.0):
            raise InvalidModelError(f"bernoulli probability must lie in (0,1), got {p}")
        return cls.finite([(-p, 1.0 - p), (1.0 - p, p)])

    @classmethod
    def parse(cls, text: str) -> "BaseVariableSpec":
        """CLI form: rademacher | bernoulli:p | centered-bernoulli:p"""
        name, _, arg = text.partition(":")
        if name == "rademacher":
            return cls.rademacher()
        if name == "bernoulli" and arg:
            return cls.bernoulli(float(arg))
        if name == "centered-bernoulli" and arg:
            return cls.centered_bernoulli(float(arg))
        raise InvalidModelError(f"unknown base variable {text!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "BaseVariableSpec":
        kind = d.get("kind")
        if kind == BaseKind.BERNOULLI:
            return cls.bernoulli(d["p"])
        if kind == BaseKind.RADEMACHER:
            return cls.rademacher()
        if kind == BaseKind.FINITE:
            return cls.finite(d["support"])
        raise InvalidModelError(f"unknown base variable kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == BaseKind.BERNOULLI:
            return {"kind": self.kind.value, "p": self.p}
        if self.kind == BaseKind.RADEMACHER:
            return {"kind": self.kind.value}
        return {"kind": self.kind.value, "support": [[v, q] for v, q in zip(self.support, self.probs)]}

    @property
    def size(self) -> int:
        return len(self.support)

    @cached_property
    def values(self) -> np.ndarray:
        return np.asarray(self.support, dtype=np.float64)

    @cached_property
    def log_probs(self) -> np.ndarray:
        return np.log(np.asarray(self.probs, dtype=np.float64))

    @cached_property
    def cuts(self) -> np.ndarray:
        """Inverse-CDF cut points (cumulative probabilities without the final 1)"""
        if self.kind == BaseKind.BERNOULLI:
            return np.array([1.0 - self.p])
        return np.cumsum(np.asarray(self.probs[:-1], dtype=np.float64))

    @cached_property
    def mean(self) -> float:
        return math.fsum(v * q for v, q in zip(self.support, self.probs))

    @cached_property
    def variance(self) -> float:
        mu = self.mean
        return math.fsum((v - mu) ** 2 * q for v, q in zip(self.support, self.probs))

    def central_moment(self, order: int) -> float:
        mu = self.mean
        return math.fsum((v - mu) ** order * q for v, q in zip(self.support, self.probs))

    def values_from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Map U(0,1) draws to values; one uniform per variable, also for point masses"""
        return self.values[np.searchsorted(self.cuts, u, side="right")]

    def key(self) -> tuple:
        return (self.kind.value, self.support, self.probs)
