"""
Exact variance and third moment by neighborhood enumeration

Var W = sum_i sum_{j in A_i} E xi_i xi_j
E W^3 = sum_i sum_{j in A_i} sum_{k in A_ij} c_ijk E xi_i xi_j xi_k,
        c_ijk = 1 if k in A_i else 2

Every expectation enumerates the joint support of X restricted to the union
of the index sets involved. Joint grids depend only on the specs of the
variables in the union, so one pass caches them by that signature. The outer
i-loop is cut into fixed chunks; chunk partials are exactly rounded with
math.fsum and combined in chunk order.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from common.errors import UnsupportedMethodError, UnsupportedSizeError
from localstat.dependency import DependencyStructure, build_dependency
from localstat.enumeration import joint_support, DEFAULT_JOINT_LIMIT
from localstat.model import LocalStatisticModel

logger = logging.getLogger("mdtk.moments")

DEFAULT_CHUNK = 64


class _Pass:
    """Caches that live for one moment computation"""

    def __init__(self, model: LocalStatisticModel, deps: DependencyStructure, limit: int):
        self.model = model
        self.deps = deps
        self.limit = limit
        self._grids = {}
        self._triples = {}
        self._lock = threading.Lock()

    def grid(self, variables: np.ndarray):
        key = tuple(self.model.base[a].key() for a in variables)
        hit = self._grids.get(key)
        if hit is None:
            try:
                hit = joint_support(self.model.base, variables, self.limit)
            except UnsupportedSizeError as e:
                raise UnsupportedMethodError(f"exact enumeration infeasible: {e}") from e
            with self._lock:
                self._grids[key] = hit
        return hit

    def expect(self, summands: tuple) -> float:
        """E prod_{i in summands} xi_i"""
        variables = self.deps.union_vars(summands)
        values, probs = self.grid(variables)
        prod = probs.copy()
        for i in summands:
            pos = np.searchsorted(variables, self.model.index_sets[i])
            prod *= self.model.xi(i, values[:, pos])
        return math.fsum(prod.tolist())

    def expect_triple(self, i: int, j: int, k: int) -> float:
        key = tuple(sorted((i, j, k)))
        value = self._triples.get(key)
        if value is None:
            value = self.expect(key)
            with self._lock:
                self._triples[key] = value
        return value


def _chunks(n: int, chunk: int) -> list:
    return [range(start, min(start + chunk, n)) for start in range(0, n, chunk)]


def _reduce(fn, n: int, chunk: int, workers: int) -> float:
    parts = _chunks(n, chunk)
    if workers <= 1 or len(parts) == 1:
        partials = [fn(rng) for rng in parts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(fn, parts))
    return math.fsum(partials)


def variance_exact(model: LocalStatisticModel, deps: DependencyStructure = None, workers: int = 1,
                   chunk: int = DEFAULT_CHUNK, limit: int = DEFAULT_JOINT_LIMIT) -> float:
    """sum_i sum_{j in A_i} E xi_i xi_j"""
    deps = deps or build_dependency(model)
    state = _Pass(model, deps, limit)

    def partial(rows):
        return math.fsum(state.expect((i, int(j))) for i in rows for j in deps.A[i])

    value = _reduce(partial, model.n, chunk, workers)
    logger.debug(f"variance_exact({model.name}) = {value!r}")
    return value


def gamma_exact(model: LocalStatisticModel, deps: DependencyStructure = None, workers: int = 1,
                chunk: int = DEFAULT_CHUNK, limit: int = DEFAULT_JOINT_LIMIT) -> float:
    """E W^3 through the neighborhood decomposition, never over all n^3 triples"""
    deps = deps or build_dependency(model)
    state = _Pass(model, deps, limit)

    def partial(rows):
        terms = []
        for i in rows:
            A_i = deps.A[i]
            for j in A_i:
                j = int(j)
                A_ij = deps.A_ij(i, j)
                inner = np.isin(A_ij, A_i, assume_unique=True)
                for k, in_A_i in zip(A_ij.tolist(), inner.tolist()):
                    value = state.expect_triple(i, j, k)
                    terms.append(value if in_A_i else 2.0 * value)
        return math.fsum(terms)

    value = _reduce(partial, model.n, chunk, workers)
    logger.debug(f"gamma_exact({model.name}) = {value!r}")
    return value


def exact_cost(model: LocalStatisticModel, deps: DependencyStructure = None) -> dict:
    """Number of pair and triple expectations and a cap on the joint grid size they need"""
    deps = deps or build_dependency(model)
    pairs, triples = 0, 0
    for i in range(model.n):
        pairs += len(deps.A[i])
        for j in deps.A[i]:
            triples += len(deps.A_ij(i, int(j)))
    widest = max(b.size for b in model.base)
    return {"pairs": pairs, "triples": triples, "max_joint": widest ** min(3 * deps.s, model.m)}
