"""
Dependency neighborhoods of a local-statistic sum

N_alpha = {i : alpha in I_i}
A_i     = {j : I_j meets I_i}
A_ij    = {k : I_k meets I_i u I_j}
A_ijk   = {l : I_l meets I_i u I_j u I_k}

Each neighborhood is the union of N_alpha over the variables it touches, so
A_ij and A_ijk are produced on demand from N_alpha instead of being stored.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.errors import InvalidModelError, MissingDeltaError
from common.protocol import Provenance
from .model import LocalStatisticModel, check_index_sets

logger = logging.getLogger("mdtk.model")


@dataclass(frozen=True)
class StructuralParams:
    n: int
    m: int
    s: int
    d: int
    delta: float
    delta_source: str = Provenance.COMPUTED.value

    def as_tuple(self) -> tuple:
        return (self.n, self.m, self.s, self.d, self.delta)

    def bound_tuple(self) -> tuple:
        """(m, n, s, d, delta), the order the bound calculators take"""
        return (self.m, self.n, self.s, self.d, self.delta)


@dataclass(frozen=True, eq=False)
class DependencyStructure:
    index_sets: tuple
    N_alpha: tuple
    A: tuple
    s: int
    d: int
    delta: Optional[float]
    delta_source: Optional[str]

    @property
    def n(self) -> int:
        return len(self.index_sets)

    @property
    def m(self) -> int:
        return len(self.N_alpha)

    def union_vars(self, summands) -> np.ndarray:
        out = self.index_sets[summands[0]]
        for i in summands[1:]:
            out = np.union1d(out, self.index_sets[i])
        return out

    def neighborhood(self, summands) -> np.ndarray:
        """Summands whose index sets meet the union of the given ones"""
        variables = self.union_vars(summands)
        return np.unique(np.concatenate([self.N_alpha[a] for a in variables]))

    def A_i(self, i: int) -> np.ndarray:
        return self.A[i]

    def A_ij(self, i: int, j: int) -> np.ndarray:
        return self.neighborhood((i, j))

    def A_ijk(self, i: int, j: int, k: int) -> np.ndarray:
        return self.neighborhood((i, j, k))

    def params(self) -> StructuralParams:
        if self.delta is None:
            raise MissingDeltaError("delta is neither asserted nor computable by enumeration; pass delta_bound")
        return StructuralParams(self.n, self.m, self.s, self.d, self.delta, self.delta_source)


def build_dependency(model: LocalStatisticModel) -> DependencyStructure:
    check_index_sets(model.index_sets, model.m)
    if model.n == 0:
        raise InvalidModelError("model has no summands")
    owners = [[] for _ in range(model.m)]
    for i, idx in enumerate(model.index_sets):
        for a in idx:
            owners[a].append(i)
    N_alpha = []
    for lst in owners:
        arr = np.asarray(lst, dtype=np.int64)
        arr.setflags(write=False)
        N_alpha.append(arr)
    A = []
    for idx in model.index_sets:
        arr = np.unique(np.concatenate([N_alpha[a] for a in idx]))
        arr.setflags(write=False)
        A.append(arr)
    s = max(len(idx) for idx in model.index_sets)
    d = max(len(arr) for arr in N_alpha)
    if model.delta_bound is not None:
        delta, source = float(model.delta_bound), Provenance.ASSERTED.value
    else:
        delta = model.computed_delta()
        source = Provenance.COMPUTED.value if delta is not None else None
    logger.debug(f"Dependency of {model.name}: s={s} d={d} max|A_i|={max(len(a) for a in A)}")
    return DependencyStructure(model.index_sets, tuple(N_alpha), tuple(A), s, d, delta, source)


def structural_params(model: LocalStatisticModel, deps: DependencyStructure = None) -> StructuralParams:
    """The five structural parameters (n, m, s, d, delta)"""
    deps = deps or build_dependency(model)
    return deps.params()
