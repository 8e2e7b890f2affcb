"""
Closed-form moments for the built-in families
"""

import math
from math import comb

from common.errors import DomainError


def _check_p(p: float):
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0,1), got {p}")


def kruns_sigma2_analytic(n: int, p: float) -> float:
    """Variance of the raw circular 2-runs count: n(p^2 + 2p^3 - 3p^4)"""
    _check_p(p)
    if n <= 2:
        raise DomainError(f"2-runs formula needs n > 2, got {n}")
    return n * (p ** 2 + 2 * p ** 3 - 3 * p ** 4)


def kruns_gamma_analytic(n: int, p: float) -> float:
    """E W^3 of the standardized circular 2-runs count"""
    sigma = math.sqrt(kruns_sigma2_analytic(n, p))
    third = p ** 2 + 6 * p ** 3 - 3 * p ** 4 - 24 * p ** 5 + 20 * p ** 6
    return n * third / sigma ** 3


def binomial_gamma_analytic(trials: int, p: float) -> float:
    """Skewness of a Binomial(trials, p) count (single-edge subgraph counts)"""
    _check_p(p)
    return (1.0 - 2.0 * p) / math.sqrt(trials * p * (1.0 - p))


def subgraph_sigma2_analytic(N: int, p: float, pattern: str) -> float:
    """Variance of the raw copy count for the edge and triangle patterns"""
    _check_p(p)
    if pattern == "edge":
        return comb(N, 2) * p * (1.0 - p)
    if pattern == "triangle":
        # copies sharing exactly one edge are the only correlated pairs
        return math.fsum([comb(N, 3) * (p ** 3 - p ** 6),
                          comb(N, 2) * (N - 2) * (N - 3) * (p ** 5 - p ** 6)])
    raise DomainError(f"no closed-form variance for pattern {pattern!r}")


def ustat_sigma2_hoeffding(m: int, s: int, zetas) -> float:
    """
    Variance of sum_{|S|=s} h(X_S) from the Hoeffding covariances.

    Args:
        zetas: zeta_1..zeta_s, zeta_c = Cov(h(X_S), h(X_T)) for |S n T| = c
    """
    zetas = list(zetas)
    if len(zetas) != s:
        raise DomainError(f"expected {s} covariances, got {len(zetas)}")
    if m < s:
        raise DomainError(f"sample size {m} below kernel order {s}")
    terms = [comb(s, c) * comb(m - s, s - c) * zetas[c - 1] for c in range(1, s + 1)]
    return comb(m, s) * math.fsum(terms)


def iid_gamma_analytic(n: int, variance: float, third_central: float) -> float:
    """E W^3 of the standardized sum of n i.i.d. copies"""
    if variance <= 0:
        raise DomainError("i.i.d. base variable has zero variance")
    return third_central / (variance ** 1.5 * math.sqrt(n))
