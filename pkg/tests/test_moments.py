import copy
import math

import mpmath
import numpy as np
import pytest

from applications import KRunsSpec, SubgraphSpec, UStatSpec, build_ustat, iid_model, kruns_raw_model, subgraph_raw_model
from common.errors import DomainError, InvalidModelError, UnsupportedMethodError
from common.protocol import MomentMethod
from localstat import BaseVariableSpec, ModelSampler, TableSummand, builtin_summand, make_model
from moments import (MomentSummary, variance_exact, gamma_exact, exact_cost, compute_moments, exact_feasible,
                     kruns_sigma2_analytic, kruns_gamma_analytic, subgraph_sigma2_analytic,
                     ustat_sigma2_hoeffding, iid_gamma_analytic, binomial_gamma_analytic, moments_mc)
from oracle import random_tiny_model


def mp_kruns_gamma(n: int, p: str) -> mpmath.mpf:
    p = mpmath.mpf(p)
    var = n * (p ** 2 + 2 * p ** 3 - 3 * p ** 4)
    third = n * (p ** 2 + 6 * p ** 3 - 3 * p ** 4 - 24 * p ** 5 + 20 * p ** 6)
    return third / var ** mpmath.mpf(1.5)


def test_gamma_of_published_runs_setting():
    gamma = kruns_gamma_analytic(1500, 0.25)
    assert 0.1375 <= gamma <= 0.1385
    assert gamma == pytest.approx(float(mp_kruns_gamma(1500, "0.25")), rel=1e-13)


@pytest.mark.parametrize("n,p", [(6, 0.3), (7, 0.5), (12, 0.25), (30, 0.1)])
def test_kruns_exact_matches_closed_form(n, p):
    raw = kruns_raw_model(KRunsSpec(n, 2, p))
    assert variance_exact(raw) == pytest.approx(kruns_sigma2_analytic(n, p), rel=1e-12)
    model = raw.normalized(math.sqrt(kruns_sigma2_analytic(n, p)))
    assert gamma_exact(model) == pytest.approx(kruns_gamma_analytic(n, p), abs=1e-12)


@pytest.mark.parametrize("N", [5, 6])
def test_triangle_variance(N):
    raw = subgraph_raw_model(SubgraphSpec(N, 0.4, "triangle"))
    assert variance_exact(raw) == pytest.approx(subgraph_sigma2_analytic(N, 0.4, "triangle"), rel=1e-12)


def test_edge_count_gamma_is_binomial():
    raw = subgraph_raw_model(SubgraphSpec(5, 0.3, "edge"))
    sigma2 = subgraph_sigma2_analytic(5, 0.3, "edge")
    assert variance_exact(raw) == pytest.approx(sigma2, rel=1e-12)
    model = raw.normalized(math.sqrt(sigma2))
    assert gamma_exact(model) == pytest.approx(binomial_gamma_analytic(10, 0.3), abs=1e-12)


def test_iid_gamma():
    base = BaseVariableSpec.bernoulli(0.2)
    model = iid_model(7, base)
    assert gamma_exact(model) == pytest.approx(iid_gamma_analytic(7, base.variance, base.central_moment(3)),
                                               abs=1e-12)


def test_hoeffding_variance_matches_enumeration():
    spec = UStatSpec(6, 2, "product-plus-linear", BaseVariableSpec.rademacher())
    # zeta_1 = Var X = 1, zeta_2 = Var(X1 X2 + X1 + X2) = 3
    sigma2 = ustat_sigma2_hoeffding(6, 2, (1.0, 3.0))
    assert sigma2 == pytest.approx(165.0)
    stat = build_ustat(spec)
    assert stat.sigma2 == pytest.approx(165.0)
    assert variance_exact(stat.model) == pytest.approx(1.0, rel=1e-12)


def test_worker_count_does_not_change_results():
    model = kruns_raw_model(KRunsSpec(40, 3, 0.35))
    assert variance_exact(model, workers=4, chunk=7) == variance_exact(model, workers=1, chunk=7)
    assert gamma_exact(model, workers=4, chunk=7) == gamma_exact(model, workers=1, chunk=7)


def test_exact_cost_counts_neighbourhoods(kruns6):
    cost = exact_cost(kruns6.model)
    assert cost["pairs"] == 6 * 3
    assert cost["triples"] == 6 * (4 + 4 + 3)


def test_domain_errors():
    with pytest.raises(DomainError):
        kruns_sigma2_analytic(10, 1.0)
    with pytest.raises(DomainError):
        kruns_sigma2_analytic(2, 0.5)
    with pytest.raises(DomainError):
        subgraph_sigma2_analytic(10, 0.5, "path:2")
    with pytest.raises(DomainError):
        ustat_sigma2_hoeffding(5, 2, (1.0,))


def test_summary_validation():
    with pytest.raises(InvalidModelError):
        MomentSummary(sigma2=1.0, var_W=1.0, gamma=0.0, method=MomentMethod.EXACT, std_errors=(0.1, 0.1))
    with pytest.raises(InvalidModelError):
        MomentSummary(sigma2=-1.0, var_W=1.0, gamma=0.0, method=MomentMethod.ANALYTIC)


def test_compute_moments_auto_prefers_analytic(kruns6):
    assert kruns6.moments.method == MomentMethod.ANALYTIC
    assert kruns6.moments.gamma == kruns_gamma_analytic(6, 0.3)


def test_compute_moments_auto_uses_exact(chain_model):
    summary = compute_moments(chain_model)
    assert summary.method == MomentMethod.EXACT
    assert summary.std_errors is None
    assert summary.var_W == variance_exact(chain_model)


def test_compute_moments_falls_back_to_monte_carlo(chain_model, config):
    tight = copy.deepcopy(config)
    tight["moments"]["exact_max_triples"] = 1
    feasible, _ = exact_feasible(chain_model, config=tight)
    assert not feasible
    summary = compute_moments(chain_model, config=tight, reps=20_000, seed=1)
    assert summary.method == MomentMethod.MONTE_CARLO
    assert any("fell back" in note for note in summary.notes)
    assert summary.var_W == pytest.approx(variance_exact(chain_model), abs=5 * summary.se_var)


def test_compute_moments_without_closed_form(chain_model):
    with pytest.raises(UnsupportedMethodError):
        compute_moments(chain_model, method="analytic")


def test_moments_mc_standard_errors():
    model = iid_model(12, BaseVariableSpec.bernoulli(0.3))
    summary = moments_mc(ModelSampler(model), 50_000, seed=5, lanes=2, block_size=4096)
    exact_gamma = gamma_exact(model)
    assert summary.var_W == pytest.approx(1.0, abs=5 * summary.se_var)
    assert summary.gamma == pytest.approx(exact_gamma, abs=5 * summary.se_gamma)
    assert summary.se_var > 0 and summary.se_gamma > 0


def test_moments_mc_is_lane_independent():
    sampler = ModelSampler(iid_model(5, BaseVariableSpec.rademacher()))
    one = moments_mc(sampler, 10_000, seed=9, lanes=1, block_size=1000)
    four = moments_mc(sampler, 10_000, seed=9, lanes=4, block_size=1000)
    assert (one.var_W, one.gamma) == (four.var_W, four.gamma)


def test_moments_mc_needs_enough_reps():
    with pytest.raises(DomainError):
        moments_mc(ModelSampler(iid_model(3, BaseVariableSpec.rademacher())), 999, seed=0)


def relabel(model, order):
    """Same model with summand i moved to position order.index(i)"""
    summand = model.summand
    return make_model(model.base, [model.index_sets[i] for i in order],
                      TableSummand([summand.tables[i] for i in order], [summand.supports[i] for i in order]),
                      center=[model.center[i] for i in order], scale=model.scale, name=f"{model.name}-relabelled")


def test_exact_moments_ignore_summand_labels():
    rng = np.random.default_rng(31)
    for t in range(10):
        model = random_tiny_model(rng, name=f"tiny-{t}")
        shuffled = relabel(model, [int(i) for i in rng.permutation(model.n)])
        assert variance_exact(shuffled) == pytest.approx(variance_exact(model), rel=1e-12, abs=1e-14)
        assert gamma_exact(shuffled) == pytest.approx(gamma_exact(model), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("k", [2, 3])
def test_kruns_rotation_invariance(k):
    spec = KRunsSpec(9, k, 0.35)
    raw = kruns_raw_model(spec)
    rotated = make_model(raw.base, [[(a + 1) % spec.n for a in idx.tolist()] for idx in raw.index_sets],
                         builtin_summand("kruns"), center=raw.center, name="rotated")
    assert variance_exact(rotated) == pytest.approx(variance_exact(raw), rel=1e-12)
    assert gamma_exact(rotated) == pytest.approx(gamma_exact(raw), rel=1e-10)


class ShiftedRademacher:
    """W = 1 + R: E W^3 = 4 while the central third moment is 0"""

    def sample(self, rng, size):
        return 1.0 + rng.choice(np.array([-1.0, 1.0]), size=size)


def test_moments_mc_gamma_is_raw_third_moment():
    summary = moments_mc(ShiftedRademacher(), reps=20_000, seed=6, block_size=5000)
    assert summary.var_W == pytest.approx(1.0, abs=1e-3)
    assert summary.gamma == pytest.approx(4.0, abs=5 * summary.se_gamma)
