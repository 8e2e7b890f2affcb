"""
Subgraph counts in G(N, p)
W = sum over copies of G of (indicator that all copy edges are present - p^e) / sigma
"""

import dataclasses
import itertools
import logging
import math
from dataclasses import dataclass
from math import comb

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher

from common.config import load_config
from common.errors import InvalidModelError, UnsupportedSizeError
from common.protocol import MomentMethod, Provenance
from localstat.base import BaseVariableSpec
from localstat.dependency import StructuralParams
from localstat.model import make_model
from localstat.summands import builtin_summand
from moments.analytic import binomial_gamma_analytic, subgraph_sigma2_analytic
from moments.compute import compute_moments
from moments.exact import variance_exact
from moments.summary import MomentSummary
from tails.bounds import MAX_PATTERN_VERTICES
from .statistic import DirectSampler, Statistic

logger = logging.getLogger("mdtk.applications")

GENERIC_MAX_N = 12
DIRECT_PATTERNS = ("edge", "triangle")
TRIANGLE_CHUNK = 256


def pattern_graph(pattern: str) -> nx.Graph:
    """edge | triangle | path:L | star:L | cycle:L | custom:<edge-list file>"""
    name, _, arg = pattern.partition(":")
    try:
        if name == "edge":
            graph = nx.path_graph(2)
        elif name == "triangle":
            graph = nx.cycle_graph(3)
        elif name == "path":
            graph = nx.path_graph(int(arg) + 1)
        elif name == "star":
            graph = nx.star_graph(int(arg))
        elif name == "cycle":
            graph = nx.cycle_graph(int(arg))
        elif name == "custom":
            graph = nx.read_edgelist(arg, nodetype=int)
        else:
            raise InvalidModelError(f"unknown pattern {pattern!r}")
    except (ValueError, OSError) as e:
        raise InvalidModelError(f"cannot build pattern {pattern!r}: {e}") from None
    return nx.convert_node_labels_to_integers(graph, ordering="sorted")


@dataclass(frozen=True)
class SubgraphSpec:
    N: int
    p: float
    pattern: str
    graph: nx.Graph = None

    def __post_init__(self):
        if self.graph is None:
            object.__setattr__(self, "graph", pattern_graph(self.pattern))
        if nx.number_of_selfloops(self.graph) > 0:
            raise InvalidModelError("pattern graph must be simple")
        if self.graph.number_of_edges() == 0:
            raise InvalidModelError("pattern graph has no edges")
        if self.v > MAX_PATTERN_VERTICES:
            raise UnsupportedSizeError(f"pattern has {self.v} vertices (limit {MAX_PATTERN_VERTICES})")
        if self.N < self.v:
            raise InvalidModelError(f"N = {self.N} is smaller than the pattern's {self.v} vertices")
        if not (0.0 < self.p < 1.0):
            raise InvalidModelError(f"p must lie in (0,1), got {self.p}")

    @property
    def v(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def e(self) -> int:
        return self.graph.number_of_edges()

    @property
    def kind(self) -> str:
        return self.pattern.partition(":")[0]


def automorphism_count(graph: nx.Graph) -> int:
    return sum(1 for _ in GraphMatcher(graph, graph).isomorphisms_iter())


def edge_index(a: int, b: int, N: int) -> int:
    """Position of edge {a, b} in the lexicographic order of all pairs"""
    if a > b:
        a, b = b, a
    return a * N - a * (a + 1) // 2 + (b - a - 1)


def enumerate_copies(graph: nx.Graph, N: int, map_limit: int = None) -> list:
    """
    Edge-index tuples of every copy of graph in K_N (not necessarily induced).
    Injective vertex maps that give the same edge set are the same copy.

    Walks all N!/(N-v)! maps and keeps one per edge set, so each copy is
    visited |Aut(G)| times; map_limit caps the walk.
    """
    v = graph.number_of_nodes()
    maps = math.perm(N, v)
    if map_limit is not None and maps > map_limit:
        raise UnsupportedSizeError(f"{maps} vertex maps for N={N}, v={v} (limit {map_limit})")
    edges = list(graph.edges)
    copies = set()
    for image in itertools.permutations(range(N), v):
        copies.add(tuple(sorted(edge_index(image[a], image[b], N) for a, b in edges)))
    return sorted(copies)


def expected_copy_count(graph: nx.Graph, N: int) -> int:
    """N!/(N-v)! / |Aut(G)|"""
    return math.perm(N, graph.number_of_nodes()) // automorphism_count(graph)


class EdgeCountSampler(DirectSampler):
    def __init__(self, spec: SubgraphSpec, center_total: float, scale: float):
        super().__init__((BaseVariableSpec.bernoulli(spec.p),) * comb(spec.N, 2), center_total, scale)

    def raw_total(self, X):
        return X.sum(axis=1)


class TriangleCountSampler(DirectSampler):
    """trace(A^3) / 6 on batched adjacency matrices"""

    def __init__(self, spec: SubgraphSpec, center_total: float, scale: float):
        super().__init__((BaseVariableSpec.bernoulli(spec.p),) * comb(spec.N, 2), center_total, scale)
        self.N = spec.N
        self._rows, self._cols = np.triu_indices(spec.N, k=1)

    def raw_total(self, X):
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], TRIANGLE_CHUNK):
            chunk = X[start:start + TRIANGLE_CHUNK]
            A = np.zeros((chunk.shape[0], self.N, self.N))
            A[:, self._rows, self._cols] = chunk
            A[:, self._cols, self._rows] = chunk
            out[start:start + chunk.shape[0]] = ((A @ A) * A).sum(axis=(1, 2)) / 6.0
        return out


def subgraph_raw_model(spec: SubgraphSpec, map_limit: int = None):
    copies = enumerate_copies(spec.graph, spec.N, map_limit)
    base = (BaseVariableSpec.bernoulli(spec.p),) * comb(spec.N, 2)
    return make_model(base, copies, builtin_summand("subgraph-indicator"), center=spec.p ** spec.e,
                      name=f"subgraph-raw(N={spec.N},p={spec.p},{spec.pattern})")


def build_subgraph(spec: SubgraphSpec, config: dict = None, seed: int = None, lanes: int = 1,
                   moments_method: str = "auto", progress: bool = False) -> Statistic:
    config = config or load_config()
    name = f"subgraph(N={spec.N},p={spec.p},{spec.pattern})"
    direct_kind = spec.kind if spec.kind in DIRECT_PATTERNS else None
    raw = None
    if spec.N <= GENERIC_MAX_N:
        raw = subgraph_raw_model(spec, config["enumeration"]["copy_map_limit"])
    elif direct_kind is None:
        raise UnsupportedSizeError(f"N={spec.N} > {GENERIC_MAX_N} needs a specialized counter (edge or triangle)")
    copy_count = raw.n if raw is not None else expected_copy_count(spec.graph, spec.N)
    center_total = raw.center_total if raw is not None else math.fsum([spec.p ** spec.e] * copy_count)

    if direct_kind is not None:
        sigma2 = subgraph_sigma2_analytic(spec.N, spec.p, direct_kind)
    else:
        sigma2 = variance_exact(raw)
    sigma = math.sqrt(sigma2)
    notes = [f"{copy_count} copies of the pattern"]

    model = None
    if raw is not None:
        model = dataclasses.replace(raw.normalized(sigma, delta_bound=1.0 / sigma), name=name)
    direct = None
    if direct_kind == "edge":
        direct = EdgeCountSampler(spec, center_total, sigma)
    elif direct_kind == "triangle":
        direct = TriangleCountSampler(spec, center_total, sigma)

    analytic = None
    if direct_kind == "edge":
        def analytic():
            return MomentSummary(sigma2=sigma2, var_W=1.0, gamma=binomial_gamma_analytic(comb(spec.N, 2), spec.p),
                                 method=MomentMethod.ANALYTIC)
    moments = compute_moments(model, moments_method, analytic=analytic, sampler=direct, seed=seed,
                              lanes=lanes, config=config, progress=progress)
    stat = Statistic(name=name, spec=spec, model=model, direct=direct, sigma2=sigma2,
                     sigma_provenance=Provenance.COMPUTED.value, moments=moments,
                     notes=notes + moments.notes, extras={"copies": copy_count})
    if model is None:
        # without the generic model: d is the copies through one edge
        through_edge = copy_count * spec.e // comb(spec.N, 2)
        stat.params = StructuralParams(copy_count, comb(spec.N, 2), spec.e, through_edge, 1.0 / sigma,
                                       Provenance.ASSERTED.value)
    return stat
