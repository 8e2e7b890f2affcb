"""
Circular k-runs
W = sum_i (X_i X_{i+1} ... X_{i+k-1} - p^k) / sigma with X_{n+i} = X_i
"""

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from common.config import load_config
from common.errors import InvalidModelError
from common.protocol import MomentMethod, Provenance
from localstat.base import BaseVariableSpec
from localstat.dependency import StructuralParams
from localstat.model import make_model
from localstat.summands import builtin_summand
from moments.analytic import kruns_sigma2_analytic, kruns_gamma_analytic
from moments.compute import compute_moments
from moments.exact import variance_exact
from moments.montecarlo import moments_mc
from moments.summary import MomentSummary
from .statistic import DirectSampler, Statistic

logger = logging.getLogger("mdtk.applications")


@dataclass(frozen=True)
class KRunsSpec:
    n: int
    k: int
    p: float

    def __post_init__(self):
        if not (1 < self.k < self.n):
            raise InvalidModelError(f"k-runs need 1 < k < n, got n={self.n} k={self.k}")
        if not (0.0 < self.p < 1.0):
            raise InvalidModelError(f"p must lie in (0,1), got {self.p}")


class KRunsSampler(DirectSampler):
    """Products of k cyclic shifts, O(nk) per replication"""

    def __init__(self, spec: KRunsSpec, center_total: float, scale: float):
        super().__init__((BaseVariableSpec.bernoulli(spec.p),) * spec.n, center_total, scale)
        self.k = spec.k

    def raw_total(self, X):
        prod = X.copy()
        for shift in range(1, self.k):
            prod *= np.roll(X, -shift, axis=1)
        return prod.sum(axis=1)


def kruns_index_sets(n: int, k: int) -> list:
    return [[(i + t) % n for t in range(k)] for i in range(n)]


def kruns_raw_model(spec: KRunsSpec):
    """Unnormalized model: xi_i = X_i ... X_{i+k-1} - p^k"""
    base = (BaseVariableSpec.bernoulli(spec.p),) * spec.n
    return make_model(base, kruns_index_sets(spec.n, spec.k), builtin_summand("kruns"),
                      center=spec.p ** spec.k, name=f"kruns-raw(n={spec.n},k={spec.k},p={spec.p})")


def build_kruns(spec: KRunsSpec, config: dict = None, seed: int = None, lanes: int = 1,
                moments_method: str = "auto", progress: bool = False) -> Statistic:
    config = config or load_config()
    raw = kruns_raw_model(spec)
    notes = []
    sigma2_se = None

    if spec.k == 2:
        sigma2 = kruns_sigma2_analytic(spec.n, spec.p)
        provenance = Provenance.COMPUTED.value
    elif spec.n <= config["moments"]["kruns_exact_max_n"]:
        sigma2 = variance_exact(raw)
        provenance = Provenance.COMPUTED.value
        notes.append("sigma^2 by exact enumeration (no closed form for k > 2)")
    else:
        seed = config["experiment"]["seed"] if seed is None else seed
        direct_raw = KRunsSampler(spec, raw.center_total, 1.0)
        est = moments_mc(direct_raw, config["moments"]["mc_reps"], seed, lanes=lanes,
                         block_size=config["experiment"]["block_size"], progress=progress)
        sigma2, sigma2_se = est.var_W, est.se_var
        provenance = Provenance.ESTIMATED.value
        notes.append(f"sigma^2 estimated by Monte Carlo: {sigma2:.6g} +/- {sigma2_se:.2g}")
        logger.warning(f"k-runs n={spec.n} k={spec.k}: sigma estimated by Monte Carlo")

    sigma = math.sqrt(sigma2)
    model = dataclasses.replace(raw.normalized(sigma, delta_bound=1.0 / sigma),
                                name=f"kruns(n={spec.n},k={spec.k},p={spec.p})")
    direct = KRunsSampler(spec, model.center_total, model.scale)
    params = StructuralParams(spec.n, spec.n, spec.k, spec.k, 1.0 / sigma, Provenance.ASSERTED.value)

    if spec.k == 2:
        def analytic():
            return MomentSummary(sigma2=sigma2, var_W=1.0, gamma=kruns_gamma_analytic(spec.n, spec.p),
                                 method=MomentMethod.ANALYTIC)
    else:
        analytic = None
    moments = compute_moments(model, moments_method, analytic=analytic, sampler=direct, seed=seed,
                              lanes=lanes, config=config, progress=progress)
    return Statistic(name=model.name, spec=spec, model=model, direct=direct, sigma2=sigma2,
                     sigma_provenance=provenance, sigma2_se=sigma2_se, params=params,
                     moments=moments, notes=notes + moments.notes)
