"""
Sampling W from a model

Every sampler consumes exactly m uniforms per replication (row-major,
inverse CDF per base variable), so a block of reps drawn at once and the same
reps drawn one at a time see identical values.
"""

from typing import Protocol

import numpy as np

from .model import LocalStatisticModel


class WSampler(Protocol):
    m: int

    def draw_base(self, rng: np.random.Generator, reps: int) -> np.ndarray:
        ...

    def w_from_base(self, X: np.ndarray) -> np.ndarray:
        ...

    def sample(self, rng: np.random.Generator, reps: int) -> np.ndarray:
        ...


class BaseDrawer:
    """Vectorized inverse-CDF draws for a tuple of base variable specs"""

    def __init__(self, base):
        self.base = tuple(base)
        self.m = len(self.base)
        groups = {}
        for a, spec in enumerate(self.base):
            groups.setdefault(spec.key(), (spec, []))[1].append(a)
        self._groups = [(spec, np.asarray(cols, dtype=np.int64)) for spec, cols in groups.values()]

    def draw_base(self, rng: np.random.Generator, reps: int) -> np.ndarray:
        U = rng.random((reps, self.m))
        if len(self._groups) == 1:
            return self._groups[0][0].values_from_uniform(U)
        X = np.empty_like(U)
        for spec, cols in self._groups:
            X[:, cols] = spec.values_from_uniform(U[:, cols])
        return X


class ModelSampler(BaseDrawer):
    """Generic sampler: evaluates every summand on its index set"""

    def __init__(self, model: LocalStatisticModel):
        super().__init__(model.base)
        self.model = model

    def w_from_base(self, X: np.ndarray) -> np.ndarray:
        return self.model.w_from_base(X)

    def sample(self, rng: np.random.Generator, reps: int) -> np.ndarray:
        return self.w_from_base(self.draw_base(rng, reps))


def sample_W(model: LocalStatisticModel, rng: np.random.Generator) -> float:
    """One draw of W; consumes m uniforms from rng"""
    return float(ModelSampler(model).sample(rng, 1)[0])
