"""
Non-degenerate U-statistics with builtin bounded kernels
W = sum_{|S| = s} h(X_S) / sigma over i.i.d. finite-support X_1..X_m
"""

import itertools
import logging
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from common.config import load_config
from common.errors import DegenerateKernelError, InvalidModelError, UnsupportedSizeError
from common.protocol import Provenance
from localstat.base import BaseVariableSpec
from localstat.dependency import StructuralParams
from localstat.enumeration import joint_support
from localstat.model import make_model
from localstat.summands import builtin_summand
from moments.analytic import ustat_sigma2_hoeffding
from moments.compute import compute_moments
from .statistic import DirectSampler, Statistic

logger = logging.getLogger("mdtk.applications")

KERNELS = {
    "product": "ustat-product",
    "product-plus-linear": "ustat-product-plus-linear",
}
GENERIC_MAX_M = 30
DIRECT_MAX_S = 3
KERNEL_TOL = 1e-10
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class UStatSpec:
    m: int
    s: int
    kernel: str
    base: BaseVariableSpec
    require_nondegenerate: bool = True

    def __post_init__(self):
        if self.s < 2:
            raise InvalidModelError(f"kernel order must be at least 2, got {self.s}")
        if self.m < self.s:
            raise InvalidModelError(f"sample size {self.m} below kernel order {self.s}")
        if self.kernel not in KERNELS:
            raise InvalidModelError(f"unknown kernel {self.kernel!r}; known: {sorted(KERNELS)}")


def kernel_summand(spec: UStatSpec):
    return builtin_summand(KERNELS[spec.kernel])


def kernel_center(spec: UStatSpec) -> float:
    """E of the raw kernel, so that h = raw - center has mean zero"""
    mu = spec.base.mean
    if spec.kernel == "product":
        return mu ** spec.s
    return mu ** spec.s + spec.s * mu


@dataclass
class KernelFacts:
    c1: float           # sup |h|
    mean: float         # E h
    zetas: tuple        # zeta_1..zeta_s
    g_second: float     # E g^2(X_1) = zeta_1


def kernel_facts(spec: UStatSpec) -> KernelFacts:
    """Tabulate h on the s-fold product support and condition on leading coordinates"""
    summand = kernel_summand(spec)
    values, probs = joint_support((spec.base,) * spec.s, list(range(spec.s)))
    shape = (spec.base.size,) * spec.s
    h = (summand.raw(0, values) - kernel_center(spec)).reshape(shape)
    probs = probs.reshape(shape)
    w = np.asarray(spec.base.probs, dtype=np.float64)
    # conds[c] = E(h | X_1..X_c), averaging out trailing coordinates one at a time
    conds = {spec.s: h}
    for c in range(spec.s - 1, 0, -1):
        conds[c] = conds[c + 1] @ w
    zetas = []
    for c in range(1, spec.s + 1):
        weight = probs
        for _ in range(spec.s - c):
            weight = weight.sum(axis=-1)
        zetas.append(math.fsum((weight * conds[c] ** 2).ravel().tolist()))
    mean = math.fsum((probs * h).ravel().tolist())
    return KernelFacts(c1=float(np.max(np.abs(h))), mean=mean, zetas=tuple(zetas), g_second=zetas[0])


def check_symmetric(spec: UStatSpec, rng: np.random.Generator = None, trials: int = 64):
    """Compare h on random inputs and random permutations of them"""
    rng = rng or np.random.default_rng(0)
    summand = kernel_summand(spec)
    X = spec.base.values_from_uniform(rng.random((trials, spec.s)))
    perm = np.argsort(rng.random((trials, spec.s)), axis=1)
    permuted = np.take_along_axis(X, perm, axis=1)
    if not np.allclose(summand.raw(0, X), summand.raw(0, permuted), rtol=0, atol=KERNEL_TOL):
        raise InvalidModelError(f"kernel {spec.kernel!r} is not symmetric")


def elementary_symmetric(X: np.ndarray, order: int) -> np.ndarray:
    """e_order of each row via Newton's identities on power sums"""
    power = [None] + [np.sum(X ** q, axis=1) for q in range(1, order + 1)]
    e = [np.ones(X.shape[0])]
    for k in range(1, order + 1):
        acc = np.zeros(X.shape[0])
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * power[i]
        e.append(acc / k)
    return e[order]


class UStatSampler(DirectSampler):
    """Full U-statistic sum from power sums, O(m s) per replication"""

    def __init__(self, spec: UStatSpec, center_total: float, scale: float):
        if spec.s > DIRECT_MAX_S:
            raise UnsupportedSizeError(f"direct U-statistic sampler handles s <= {DIRECT_MAX_S}, got {spec.s}")
        super().__init__((spec.base,) * spec.m, center_total, scale)
        self.spec = spec

    def raw_total(self, X):
        total = elementary_symmetric(X, self.spec.s)
        if self.spec.kernel == "product-plus-linear":
            # every X_j sits in C(m-1, s-1) subsets
            total = total + comb(self.spec.m - 1, self.spec.s - 1) * X.sum(axis=1)
        return total


def build_ustat(spec: UStatSpec, config: dict = None, seed: int = None, lanes: int = 1,
                moments_method: str = "auto", progress: bool = False) -> Statistic:
    config = config or load_config()
    check_symmetric(spec)
    facts = kernel_facts(spec)
    if abs(facts.mean) > KERNEL_TOL:
        raise InvalidModelError(f"kernel mean {facts.mean:.3e} is not zero")
    if facts.g_second <= DEGENERACY_TOL:
        message = f"kernel {spec.kernel!r} on {spec.base.to_dict()} is degenerate: E g^2(X_1) = {facts.g_second:.3e}"
        if spec.require_nondegenerate:
            raise DegenerateKernelError(message)
        logger.warning(message)

    sigma2 = ustat_sigma2_hoeffding(spec.m, spec.s, facts.zetas)
    if sigma2 <= 0:
        raise DegenerateKernelError(f"U-statistic sum has zero variance for {spec}")
    sigma = math.sqrt(sigma2)
    n = comb(spec.m, spec.s)
    name = f"ustat(m={spec.m},s={spec.s},kernel={spec.kernel})"
    center_total = math.fsum([kernel_center(spec)] * n)
    notes = [f"sigma^2 from Hoeffding covariances zeta={list(facts.zetas)}"]

    model = None
    if spec.m <= GENERIC_MAX_M:
        model = make_model((spec.base,) * spec.m, itertools.combinations(range(spec.m), spec.s),
                           kernel_summand(spec), center=kernel_center(spec), scale=sigma,
                           delta_bound=facts.c1 / sigma, name=name)
        center_total = model.center_total
    direct = UStatSampler(spec, center_total, sigma) if spec.s <= DIRECT_MAX_S else None
    if model is None and direct is None:
        raise UnsupportedSizeError(f"m={spec.m} > {GENERIC_MAX_M} needs the direct sampler, which handles s <= {DIRECT_MAX_S}")

    params = StructuralParams(n, spec.m, spec.s, comb(spec.m - 1, spec.s - 1), facts.c1 / sigma,
                              Provenance.ASSERTED.value)
    moments = compute_moments(model, moments_method, sampler=direct, seed=seed, lanes=lanes,
                              config=config, progress=progress)
    return Statistic(name=name, spec=spec, model=model, direct=direct, sigma2=sigma2, params=params,
                     moments=moments, notes=notes + moments.notes, extras={"c1": facts.c1, "zetas": facts.zetas})
