"""
Tail approximations for a standardized sum W

normal            1 - Phi(x)
skew              (1 - Phi(x)) exp(gamma x^3 / 6)
poisson           P(Z_gamma > x), Z_gamma = gamma (Y - 1/gamma^2), Y ~ Poisson(1/gamma^2)

Right tails are P(W > x); left tails P(W < -x) use the same formulas with
gamma negated. Every value has a log-space companion for large x.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaln, log_ndtr, logsumexp, pdtr, pdtrc

from common.errors import DomainError, RangeError
from common.protocol import Record, TailKind

SQRT2 = math.sqrt(2.0)
LATTICE_TOL = 1e-9
EPS = np.finfo(np.float64).eps
# below this a linear tail value is recomputed from logs
TINY = 1e-280
# math.exp overflows just above this
EXP_MAX = 709.0
LAMBDA_MAX = 1e15


def normal_tail(x: float) -> float:
    """1 - Phi(x) through erfc"""
    return float(0.5 * erfc(x / SQRT2))


def log_normal_tail(x: float) -> float:
    return float(log_ndtr(-x))


def _exp_or_inf(log_value: float) -> float:
    return math.exp(log_value) if log_value < EXP_MAX else math.inf


def _skew_exponent(x: float, gamma: float) -> float:
    if gamma == 0:
        return 0.0
    return gamma * x * x * x / 6.0


def skew_corrected_tail(x: float, gamma: float) -> float:
    """
    (1 - Phi(x)) exp(gamma x^3 / 6). Not a probability: may exceed 1 for
    negative gamma x^3 large enough.
    """
    base = normal_tail(x)
    exponent = _skew_exponent(x, gamma)
    if base > TINY and exponent < EXP_MAX:
        return base * math.exp(exponent)
    return _exp_or_inf(log_skew_corrected_tail(x, gamma))


def log_skew_corrected_tail(x: float, gamma: float) -> float:
    return log_normal_tail(x) + _skew_exponent(x, gamma)


def _poisson_mean(gamma: float) -> float:
    if gamma == 0 or not math.isfinite(gamma):
        raise DomainError(f"standardized Poisson needs a finite nonzero gamma, got {gamma}")
    lam = 1.0 / gamma ** 2
    if not math.isfinite(lam) or lam > LAMBDA_MAX:
        raise DomainError(f"Poisson mean 1/gamma^2 = {lam:.3e} is out of range for gamma = {gamma}")
    return lam


def _snap(t: float, gamma: float) -> float:
    """Round t = lam + x/gamma to an integer when x is within LATTICE_TOL of an atom"""
    r = round(t)
    tol = max(LATTICE_TOL / abs(gamma), 4.0 * EPS * abs(t))
    return float(r) if abs(t - r) <= tol else t


def _poisson_cut(x: float, gamma: float):
    """
    Z > x as a condition on Y.

    Returns:
        (lam, "upper", k): P(Y > k); (lam, "lower", k): P(Y <= k); k may be negative.
    """
    lam = _poisson_mean(gamma)
    t = _snap(lam + x / gamma, gamma)
    if gamma > 0:
        return lam, "upper", math.floor(t)
    return lam, "lower", math.ceil(t) - 1


def standardized_poisson_tail(x: float, gamma: float) -> float:
    """P(Z_gamma > x); atoms sitting exactly at x are excluded"""
    lam, side, k = _poisson_cut(x, gamma)
    if side == "upper":
        value = 1.0 if k < 0 else float(pdtrc(k, lam))
    else:
        value = 0.0 if k < 0 else float(pdtr(k, lam))
    empty = side == "lower" and k < 0
    if value < TINY and not empty:
        return math.exp(log_standardized_poisson_tail(x, gamma))
    return value


def _log_pmf(ks: np.ndarray, lam: float) -> np.ndarray:
    return ks * math.log(lam) - lam - gammaln(ks + 1.0)


def log_standardized_poisson_tail(x: float, gamma: float) -> float:
    lam, side, k = _poisson_cut(x, gamma)
    if side == "upper":
        if k < 0:
            return 0.0
        value = float(pdtrc(k, lam))
        if value > TINY:
            return math.log(value)
        # k + 1 is far above the mean; terms decay at least geometrically
        span = int(50 + 20 * math.sqrt(lam) + 0.1 * (k + 1))
        ks = np.arange(k + 1, k + 1 + span, dtype=np.float64)
    else:
        if k < 0:
            return -math.inf
        value = float(pdtr(k, lam))
        if value > TINY:
            return math.log(value)
        span = int(50 + 20 * math.sqrt(lam) + 0.1 * k)
        ks = np.arange(max(0, k - span), k + 1, dtype=np.float64)
    return float(logsumexp(_log_pmf(ks, lam)))


def cramer_diagnostic(x: float, gamma: float) -> float:
    """P(Z_gamma > x) / ((1 - Phi(x)) exp(gamma x^3 / 6)) - 1 for 0 <= x <= |gamma|^(-1/2)"""
    if gamma == 0:
        raise DomainError("Cramer diagnostic needs gamma != 0")
    if abs(gamma) > 1:
        raise RangeError(f"|gamma| = {abs(gamma)} exceeds 1")
    x_top = abs(gamma) ** -0.5
    if not (0.0 <= x <= x_top):
        raise RangeError(f"x = {x} outside [0, {x_top:.6g}]")
    log_ratio = log_standardized_poisson_tail(x, gamma) - log_skew_corrected_tail(x, gamma)
    return math.expm1(log_ratio)


def cramer_envelope(x: float, gamma: float) -> float:
    """|gamma|(1 + x) + gamma^2 x^4"""
    return abs(gamma) * (1.0 + x) + gamma ** 2 * x ** 4


def fit_cramer_constant(gamma: float, x_grid) -> float:
    """Smallest C with |diagnostic| <= C * envelope on the grid"""
    return max(abs(cramer_diagnostic(x, gamma)) / cramer_envelope(x, gamma) for x in x_grid)


@dataclass
class PoissonPointApprox(Record):
    w0: float
    gamma: float
    exact: float        # P(Z_gamma = w0)
    approx: float       # |gamma| / sqrt(2 pi) exp(-w0^2/2 + gamma w0^3/6), inf past float range
    log_exact: float
    log_approx: float

    @property
    def ratio(self) -> float:
        if self.log_exact == -math.inf:
            return 0.0
        return _exp_or_inf(self.log_exact - self.log_approx)


def poisson_point_approx(w0: float, gamma: float) -> PoissonPointApprox:
    lam = _poisson_mean(gamma)
    y = w0 / gamma + lam
    k = round(y)
    if abs(y - k) > LATTICE_TOL:
        raise DomainError(f"w0 = {w0} is not on the lattice gamma*Z - 1/gamma for gamma = {gamma}")
    log_exact = -math.inf if k < 0 else float(_log_pmf(np.float64(k), lam))
    log_approx = math.log(abs(gamma) / math.sqrt(2.0 * math.pi)) - w0 * w0 / 2.0 + _skew_exponent(w0, gamma)
    return PoissonPointApprox(w0, gamma, math.exp(log_exact), _exp_or_inf(log_approx), log_exact, log_approx)


@dataclass(frozen=True)
class TailApprox:
    """One approximation kind bound to a gamma"""
    kind: TailKind
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind == TailKind.POISSON:
            _poisson_mean(self.gamma)

    def right(self, x: float) -> float:
        if self.kind == TailKind.NORMAL:
            return normal_tail(x)
        if self.kind == TailKind.SKEW:
            return skew_corrected_tail(x, self.gamma)
        return standardized_poisson_tail(x, self.gamma)

    def left(self, x: float) -> float:
        """Approximation of P(W < -x)"""
        if self.kind == TailKind.NORMAL:
            return normal_tail(x)
        if self.kind == TailKind.SKEW:
            return skew_corrected_tail(x, -self.gamma)
        # -Z_gamma is Z_{-gamma}
        return standardized_poisson_tail(x, -self.gamma)

    def log_right(self, x: float) -> float:
        if self.kind == TailKind.NORMAL:
            return log_normal_tail(x)
        if self.kind == TailKind.SKEW:
            return log_skew_corrected_tail(x, self.gamma)
        return log_standardized_poisson_tail(x, self.gamma)

    def log_left(self, x: float) -> float:
        return TailApprox(self.kind, -self.gamma).log_right(x)


def tail_value(kind: TailKind, x: float, gamma: float = 0.0, side: str = "right") -> float:
    approx = TailApprox(TailKind(kind), gamma)
    return approx.right(x) if side == "right" else approx.left(x)
