import math

import numpy as np
import pytest

from applications import (KRunsSpec, UStatSpec, SubgraphSpec, build_kruns, build_ustat, build_subgraph, build_iid,
                          pattern_graph, automorphism_count, enumerate_copies, expected_copy_count,
                          elementary_symmetric, kernel_facts, subgraph_raw_model)
from applications.subgraph import edge_index
from common.errors import InvalidModelError, DegenerateKernelError, UnsupportedSizeError
from common.protocol import MomentMethod, Provenance
from localstat import BaseVariableSpec, ModelSampler, build_dependency
from moments import (variance_exact, gamma_exact, kruns_sigma2_analytic, binomial_gamma_analytic,
                     ustat_sigma2_hoeffding)
from oracle import exact_distribution, exact_moments


def same_w(stat, seed=0, reps=500):
    generic = ModelSampler(stat.model)
    X = generic.draw_base(np.random.default_rng(seed), reps)
    return generic.w_from_base(X), stat.direct.w_from_base(X)


@pytest.mark.parametrize("n,k,p", [(2, 2, 0.5), (5, 1, 0.5), (5, 5, 0.5), (5, 2, 0.0), (5, 2, 1.0)])
def test_kruns_spec_validation(n, k, p):
    with pytest.raises(InvalidModelError):
        KRunsSpec(n, k, p)


def test_kruns_normalization():
    stat = build_kruns(KRunsSpec(20, 2, 0.3))
    assert stat.sigma2 == kruns_sigma2_analytic(20, 0.3)
    assert variance_exact(stat.model) == pytest.approx(1.0, rel=1e-12)
    assert stat.params.as_tuple() == (20, 20, 2, 2, 1.0 / math.sqrt(stat.sigma2))
    assert stat.params.delta_source == Provenance.ASSERTED.value


@pytest.mark.parametrize("k", [2, 3, 4])
def test_kruns_direct_matches_generic(k):
    stat = build_kruns(KRunsSpec(25, k, 0.45))
    generic, direct = same_w(stat)
    assert np.array_equal(generic, direct)


def test_kruns_higher_order_sigma_is_exact_when_small():
    stat = build_kruns(KRunsSpec(30, 3, 0.25))
    assert stat.sigma_provenance == Provenance.COMPUTED.value
    assert stat.moments.method == MomentMethod.EXACT
    assert stat.moments.var_W == pytest.approx(1.0, rel=1e-12)


def test_kruns_higher_order_sigma_estimated_when_large(small_config):
    stat = build_kruns(KRunsSpec(300, 3, 0.25), config=small_config, seed=3)
    assert stat.sigma_provenance == Provenance.ESTIMATED.value
    assert stat.sigma2_se is not None and stat.sigma2_se > 0
    assert any("estimated" in note for note in stat.notes)


def test_elementary_symmetric():
    X = np.array([[1.0, 2.0, 3.0, 4.0], [-1.0, 1.0, -1.0, 1.0]])
    assert elementary_symmetric(X, 1).tolist() == [10.0, 0.0]
    assert elementary_symmetric(X, 2).tolist() == [35.0, -2.0]
    assert elementary_symmetric(X, 3).tolist() == [50.0, 0.0]


def test_kernel_facts_product_plus_linear():
    facts = kernel_facts(UStatSpec(6, 2, "product-plus-linear", BaseVariableSpec.rademacher()))
    assert facts.c1 == 3.0
    assert facts.zetas == pytest.approx((1.0, 3.0))
    assert facts.mean == pytest.approx(0.0, abs=1e-15)


def test_degenerate_kernel_rejected():
    spec = UStatSpec(8, 2, "product", BaseVariableSpec.rademacher())
    with pytest.raises(DegenerateKernelError):
        build_ustat(spec)
    relaxed = UStatSpec(8, 2, "product", BaseVariableSpec.rademacher(), require_nondegenerate=False)
    stat = build_ustat(relaxed)
    # sum_{i<j} X_i X_j has variance C(8,2)
    assert stat.sigma2 == pytest.approx(28.0)


@pytest.mark.parametrize("kernel,base,s", [
    ("product", "bernoulli:0.3", 2),
    ("product", "bernoulli:0.3", 3),
    ("product-plus-linear", "rademacher", 3),
    ("product-plus-linear", "centered-bernoulli:0.2", 2),
])
def test_ustat_direct_matches_generic(kernel, base, s):
    stat = build_ustat(UStatSpec(7, s, kernel, BaseVariableSpec.parse(base)))
    generic, direct = same_w(stat)
    assert direct == pytest.approx(generic, abs=1e-10)
    assert variance_exact(stat.model) == pytest.approx(1.0, rel=1e-10)


def test_ustat_structural_params():
    stat = build_ustat(UStatSpec(10, 2, "product-plus-linear", BaseVariableSpec.rademacher()))
    assert stat.params.as_tuple()[:4] == (45, 10, 2, 9)
    assert stat.params.delta == pytest.approx(3.0 / math.sqrt(stat.sigma2))
    assert stat.extras["c1"] == 3.0


def test_ustat_large_m_uses_direct_sampler_only(small_config):
    stat = build_ustat(UStatSpec(40, 2, "product-plus-linear", BaseVariableSpec.rademacher()), config=small_config, seed=2)
    assert stat.model is None
    assert stat.direct is not None
    assert stat.moments.method == MomentMethod.MONTE_CARLO


@pytest.mark.parametrize("pattern,v,e,aut", [
    ("edge", 2, 1, 2), ("triangle", 3, 3, 6), ("path:2", 3, 2, 2), ("star:3", 4, 3, 6), ("cycle:4", 4, 4, 8),
])
def test_pattern_graphs(pattern, v, e, aut):
    graph = pattern_graph(pattern)
    assert (graph.number_of_nodes(), graph.number_of_edges()) == (v, e)
    assert automorphism_count(graph) == aut


def test_custom_pattern(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1\n1 2\n2 0\n2 3\n", encoding="utf-8")
    graph = pattern_graph(f"custom:{path}")
    assert graph.number_of_nodes() == 4 and graph.number_of_edges() == 4
    with pytest.raises(InvalidModelError):
        pattern_graph(f"custom:{tmp_path / 'missing.txt'}")
    with pytest.raises(InvalidModelError):
        pattern_graph("hexagon")


def test_edge_index_is_lexicographic():
    N = 6
    pairs = [(a, b) for a in range(N) for b in range(a + 1, N)]
    assert [edge_index(a, b, N) for a, b in pairs] == list(range(len(pairs)))
    assert edge_index(4, 1, N) == edge_index(1, 4, N)


@pytest.mark.parametrize("pattern,N", [("triangle", 5), ("path:2", 5), ("star:3", 6), ("cycle:4", 6)])
def test_copy_enumeration(pattern, N):
    graph = pattern_graph(pattern)
    copies = enumerate_copies(graph, N)
    assert len(copies) == expected_copy_count(graph, N)
    assert all(len(c) == graph.number_of_edges() for c in copies)


def test_copy_enumeration_limit():
    with pytest.raises(UnsupportedSizeError):
        enumerate_copies(pattern_graph("triangle"), 12, map_limit=100)


@pytest.mark.parametrize("pattern", ["edge", "triangle"])
def test_subgraph_direct_matches_generic(pattern):
    stat = build_subgraph(SubgraphSpec(7, 0.35, pattern))
    generic, direct = same_w(stat)
    assert np.array_equal(generic, direct)
    assert variance_exact(stat.model) == pytest.approx(1.0, rel=1e-12)


def test_subgraph_edge_moments_analytic():
    stat = build_subgraph(SubgraphSpec(6, 0.2, "edge"))
    assert stat.moments.method == MomentMethod.ANALYTIC
    assert stat.moments.gamma == binomial_gamma_analytic(15, 0.2)


def test_subgraph_generic_pattern_small_N():
    stat = build_subgraph(SubgraphSpec(6, 0.5, "path:2"))
    assert stat.direct is None
    assert stat.extras["copies"] == 60
    assert stat.moments.method == MomentMethod.EXACT
    assert stat.moments.var_W == pytest.approx(1.0, rel=1e-12)


def test_subgraph_large_N_needs_direct_counter():
    with pytest.raises(UnsupportedSizeError):
        build_subgraph(SubgraphSpec(20, 0.5, "path:2"))


def test_subgraph_large_triangle(small_config):
    stat = build_subgraph(SubgraphSpec(30, 0.1, "triangle"), config=small_config, seed=1)
    assert stat.model is None
    assert stat.extras["copies"] == math.comb(30, 3)
    # 28 triangles through each edge
    assert stat.params.as_tuple()[:4] == (math.comb(30, 3), math.comb(30, 2), 3, 28)


def test_iid_statistic():
    base = BaseVariableSpec.bernoulli(0.3)
    stat = build_iid(10, base)
    assert stat.moments.gamma == pytest.approx(gamma_exact(stat.model), abs=1e-12)
    assert stat.sampler.model is stat.model


def test_rademacher_product_six():
    spec = UStatSpec(6, 2, "product", BaseVariableSpec.rademacher(), require_nondegenerate=False)
    stat = build_ustat(spec)
    assert stat.sigma2 == pytest.approx(15.0)
    mean, var, _, _ = exact_moments(exact_distribution(stat.model))
    assert mean == pytest.approx(0.0, abs=1e-10)
    assert var == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kernel,base", [("product-plus-linear", "rademacher"), ("product", "bernoulli:0.3")])
def test_ustat_variance_grows_like_m_power(kernel, base):
    s = 2
    facts = kernel_facts(UStatSpec(10, s, kernel, BaseVariableSpec.parse(base)))
    scaled = [ustat_sigma2_hoeffding(m, s, facts.zetas) / m ** (2 * s - 1) for m in (10, 20, 40)]
    assert max(scaled) <= 2 * min(scaled)
    built = build_ustat(UStatSpec(20, s, kernel, BaseVariableSpec.parse(base)))
    assert built.sigma2 == pytest.approx(ustat_sigma2_hoeffding(20, s, facts.zetas), rel=1e-12)


@pytest.mark.parametrize("N", [4, 6, 8, 10, 12])
def test_triangle_dependency_degree(N):
    deps = build_dependency(subgraph_raw_model(SubgraphSpec(N, 0.3, "triangle")))
    # every edge lies in N - 2 triangles
    assert deps.d == N - 2
    assert deps.d <= 3 * N
