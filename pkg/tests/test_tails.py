import math

import mpmath
import pytest
from scipy.stats import poisson

from common.errors import DomainError, RangeError
from common.protocol import TailKind
from tails import (normal_tail, log_normal_tail, skew_corrected_tail, log_skew_corrected_tail,
                   standardized_poisson_tail, log_standardized_poisson_tail, cramer_diagnostic, cramer_envelope,
                   fit_cramer_constant, poisson_point_approx, TailApprox, tail_value)
from .conftest import mp_normal_tail, mp_poisson_upper


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0, 4.0, 8.0, 20.0])
def test_normal_tail_against_mpmath(x):
    assert normal_tail(x) == pytest.approx(float(mp_normal_tail(x)), rel=1e-13)


def test_normal_tail_at_zero():
    assert normal_tail(0.0) == 0.5


def test_log_normal_tail_far_out():
    value = log_normal_tail(40.0)
    assert math.isfinite(value)
    assert value == pytest.approx(float(mpmath.log(mp_normal_tail(40))), rel=1e-12)


def test_skew_reduces_to_normal():
    for x in (0.0, 1.0, 2.0, 3.5):
        assert skew_corrected_tail(x, 0.0) == normal_tail(x)


def test_skew_against_mpmath():
    x, gamma = 2.5, 0.138
    expected = mp_normal_tail(x) * mpmath.exp(mpmath.mpf(gamma) * mpmath.mpf(x) ** 3 / 6)
    assert skew_corrected_tail(x, gamma) == pytest.approx(float(expected), rel=1e-13)


def test_skew_underflow_uses_logs():
    x, gamma = 38.0, 0.01
    expected = mpmath.log(mp_normal_tail(x)) + mpmath.mpf(gamma) * x ** 3 / 6
    assert log_skew_corrected_tail(x, gamma) == pytest.approx(float(expected), rel=1e-12)
    assert skew_corrected_tail(x, gamma) == pytest.approx(float(mpmath.exp(expected)), rel=1e-9)


def test_poisson_tail_at_zero_gamma_one():
    assert standardized_poisson_tail(0.0, 1.0) == pytest.approx(1.0 - 2.0 * math.exp(-1.0), abs=1e-15)


def test_poisson_excludes_lattice_atom():
    # gamma = 1, x = 1: Z > 1 iff Y > 2
    assert standardized_poisson_tail(1.0, 1.0) == pytest.approx(float(mp_poisson_upper(2, 1)), rel=1e-13)


@pytest.mark.parametrize("x,gamma", [(0.5, 0.2), (2.0, 0.138), (3.0, 0.07)])
def test_poisson_tail_against_mpmath(x, gamma):
    lam = 1 / mpmath.mpf(gamma) ** 2
    k = int(mpmath.floor(lam + mpmath.mpf(x) / gamma))
    assert standardized_poisson_tail(x, gamma) == pytest.approx(float(mp_poisson_upper(k, lam)), rel=1e-11)


def test_poisson_negative_gamma_is_reflection():
    x, gamma = 1.3, 0.3
    lam = 1 / mpmath.mpf(gamma) ** 2
    # P(Z_{-g} > x) = P(Z_g < -x) = P(Y < lam - x/g)
    t = lam - mpmath.mpf(x) / gamma
    k = int(mpmath.ceil(t)) - 1
    expected = 1 - mp_poisson_upper(k, lam)
    assert standardized_poisson_tail(x, -gamma) == pytest.approx(float(expected), rel=1e-11)


@pytest.mark.parametrize("x", [30.0, 300.0])
def test_poisson_log_tail_far_out(x):
    gamma = 0.5
    lam = 1 / mpmath.mpf(gamma) ** 2
    k = int(mpmath.floor(lam + mpmath.mpf(x) / gamma))
    terms = [mpmath.exp(-lam) * lam ** j / mpmath.factorial(j) for j in range(k + 1, k + 200)]
    value = log_standardized_poisson_tail(x, gamma)
    assert math.isfinite(value)
    assert value == pytest.approx(float(mpmath.log(mpmath.fsum(terms))), rel=1e-9)


def test_poisson_needs_nonzero_gamma():
    with pytest.raises(DomainError):
        standardized_poisson_tail(1.0, 0.0)
    with pytest.raises(DomainError):
        standardized_poisson_tail(1.0, 1e-9)


def test_cramer_diagnostic_range():
    with pytest.raises(RangeError):
        cramer_diagnostic(1.0, 1.5)
    with pytest.raises(RangeError):
        cramer_diagnostic(11.0, 0.01)
    with pytest.raises(DomainError):
        cramer_diagnostic(1.0, 0.0)


@pytest.mark.parametrize("gamma", [0.01, 0.05, -0.05])
def test_cramer_diagnostic_within_envelope(gamma):
    for x in (0.0, 0.5, 1.0, 2.0):
        assert abs(cramer_diagnostic(x, gamma)) <= 5 * cramer_envelope(x, gamma)


def test_fit_cramer_constant():
    grid = [0.0, 1.0, 2.0, 3.0]
    C = fit_cramer_constant(0.05, grid)
    assert C > 0
    for x in grid:
        assert abs(cramer_diagnostic(x, 0.05)) <= C * cramer_envelope(x, 0.05) * (1 + 1e-12)


def test_poisson_point_approx():
    point = poisson_point_approx(0.0, 0.1)
    assert point.exact == pytest.approx(float(mpmath.exp(-100) * mpmath.mpf(100) ** 100 / mpmath.factorial(100)),
                                        rel=1e-11)
    assert point.ratio == pytest.approx(1.0, abs=0.01)
    with pytest.raises(DomainError):
        poisson_point_approx(0.05, 0.1)


def test_tail_approx_sides():
    approx = TailApprox(TailKind.SKEW, 0.2)
    assert approx.left(2.0) == skew_corrected_tail(2.0, -0.2)
    assert approx.log_left(2.0) == pytest.approx(math.log(approx.left(2.0)))
    assert tail_value("normal", 1.0) == normal_tail(1.0)
    assert tail_value("poisson", 1.0, 0.3, side="left") == standardized_poisson_tail(1.0, -0.3)
    with pytest.raises(DomainError):
        TailApprox(TailKind.POISSON, 0.0)


@pytest.mark.parametrize("gamma", [0.05, -0.05, 0.138, -0.138, 0.5, -0.5])
def test_standardized_poisson_moments(gamma):
    lam = 1.0 / gamma ** 2
    top = int(lam + 40 * math.sqrt(lam) + 40)
    atoms = [gamma * (k - lam) for k in range(top)]
    probs = [poisson_point_approx(z, gamma).exact for z in atoms]
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-9)
    assert math.fsum(p * z for p, z in zip(probs, atoms)) == pytest.approx(0.0, abs=1e-9)
    assert math.fsum(p * z ** 2 for p, z in zip(probs, atoms)) == pytest.approx(1.0, abs=1e-9)
    assert math.fsum(p * z ** 3 for p, z in zip(probs, atoms)) == pytest.approx(gamma, abs=1e-9)


def test_poisson_close_to_normal_for_small_gamma():
    for x in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
        assert abs(standardized_poisson_tail(x, 1e-3) - normal_tail(x)) <= 5e-3


def test_cramer_diagnostic_shrinks_with_gamma():
    grid = [0.5 * j for j in range(7)]
    coarse = max(abs(cramer_diagnostic(x, 0.01)) for x in grid)
    fine = max(abs(cramer_diagnostic(x, 0.001)) for x in grid)
    assert coarse <= 0.05
    assert fine < coarse


def test_normal_tail_decreasing_and_symmetric():
    xs = [-6.0 + 0.25 * j for j in range(49)]
    values = [normal_tail(x) for x in xs]
    assert all(a > b for a, b in zip(values, values[1:]))
    for x in xs:
        assert normal_tail(-x) == pytest.approx(1.0 - normal_tail(x), abs=1e-15)


@pytest.mark.parametrize("gamma", [-0.2, -0.1, 0.0, 0.1, 0.2])
def test_skew_tail_decreasing_on_moderate_range(gamma):
    values = [skew_corrected_tail(0.1 * j, gamma) for j in range(31)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("x,gamma", [(30.0, 1.0), (-100.0, -1.0), (1e5, 0.2)])
def test_skew_tail_overflows_to_inf(x, gamma):
    assert skew_corrected_tail(x, gamma) == math.inf
    assert log_skew_corrected_tail(x, gamma) > 709.0


def test_skew_tail_large_but_finite():
    value = skew_corrected_tail(20.0, 0.5)
    assert math.isfinite(value)
    assert value == pytest.approx(math.exp(log_skew_corrected_tail(20.0, 0.5)), rel=1e-9)
    assert skew_corrected_tail(30.0, -1.0) == 0.0


@pytest.mark.parametrize("gamma", [1.0, 0.3, -0.3])
def test_poisson_tail_is_a_step_function(gamma):
    xs = [-5.0 + 0.01 * j for j in range(1001)]
    values = [standardized_poisson_tail(x, gamma) for x in xs]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert len(set(values)) > 3


def test_poisson_tail_right_continuous_at_atoms():
    # gamma = 1: atoms at k - 1
    for atom in (0.0, 1.0, 2.0):
        assert standardized_poisson_tail(atom, 1.0) == standardized_poisson_tail(atom + 1e-6, 1.0)
        jump = standardized_poisson_tail(atom - 1e-6, 1.0) - standardized_poisson_tail(atom, 1.0)
        assert jump == pytest.approx(float(poisson.pmf(int(atom) + 1, 1.0)), rel=1e-10)


def test_lattice_tie_tolerance_is_measured_in_x():
    gamma = 0.01
    lam = 1.0 / gamma ** 2
    atom = 0.2      # gamma * (10020 - lam)
    assert standardized_poisson_tail(atom - 5e-10, gamma) == standardized_poisson_tail(atom, gamma)
    jump = standardized_poisson_tail(atom - 5e-9, gamma) - standardized_poisson_tail(atom, gamma)
    assert jump == pytest.approx(float(poisson.pmf(10020, lam)), rel=1e-6)


def test_poisson_point_approx_far_out():
    point = poisson_point_approx(98.0, 0.5)
    expected = math.log(0.5 / math.sqrt(2.0 * math.pi)) - 98.0 ** 2 / 2 + 0.5 * 98.0 ** 3 / 6
    assert point.log_approx == pytest.approx(expected, rel=1e-12)
    assert point.approx == math.inf
    assert point.exact > 0.0
    assert point.ratio == 0.0
    below = poisson_point_approx(-2.5, 0.5)
    assert below.exact == 0.0 and below.ratio == 0.0
