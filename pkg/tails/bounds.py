"""
Error bounds and validity ranges

The absolute constants C, C0 (and C(G) for subgraph counts) are never derived
here; they are caller inputs and every report labels them as such.
"""

import itertools
import math
from dataclasses import dataclass, field
from math import comb

import networkx as nx

from common.errors import DomainError, UnsupportedSizeError
from common.protocol import Provenance, Record

MAX_PATTERN_VERTICES = 8


@dataclass
class BoundReport(Record):
    family: str
    x: float
    bound_value: float          # C m n s^4 d^4 delta^5 (1 + x^2) or the family's rate
    x_max: float                # C0 (m n s^4 d^4 delta^5)^(-1/2) or the family's range
    constants_used: dict
    parameters: dict
    in_range: bool
    constants_provenance: str = Provenance.USER_SUPPLIED.value
    extras: dict = field(default_factory=dict)


def _params(params) -> tuple:
    if hasattr(params, "bound_tuple"):
        params = params.bound_tuple()
    m, n, s, d, delta = params
    for name, value in zip("mnsd", (m, n, s, d)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError(f"delta must be positive and finite, got {delta}")
    return m, n, s, d, delta


def _constants(**kwargs):
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"constant {name} must be positive, got {value}")


def theorem1_bound(params, x: float, C: float = 1.0, C0: float = 1.0, family: str = "theorem1") -> BoundReport:
    """
    Relative error bound C m n s^4 d^4 delta^5 (1 + x^2), valid for
    0 <= x <= C0 (m n s^4 d^4 delta^5)^(-1/2).

    Args:
        params: (m, n, s, d, delta) or a StructuralParams
    """
    m, n, s, d, delta = _params(params)
    _constants(C=C, C0=C0)
    rate = m * n * s ** 4 * d ** 4 * delta ** 5
    x_max = C0 * rate ** -0.5
    return BoundReport(
        family=family,
        x=x,
        bound_value=C * rate * (1.0 + x ** 2),
        x_max=x_max,
        constants_used={"C": C, "C0": C0},
        parameters={"m": m, "n": n, "s": s, "d": d, "delta": delta},
        in_range=0.0 <= x <= x_max,
    )


def kolmogorov_bound(params, C: float = 1.0) -> float:
    """sup_x |P(W <= x) - Phi(x)| <= C n s^2 d^2 delta^3"""
    m, n, s, d, delta = _params(params)
    _constants(C=C)
    return C * n * s ** 2 * d ** 2 * delta ** 3


def mgf_t_max(params, C0: float = 1.0) -> float:
    """Range 0 <= t <= C0 (n s^2 d^2 delta^3)^(-1/2) of the moment generating function bound"""
    m, n, s, d, delta = _params(params)
    _constants(C0=C0)
    return C0 * (n * s ** 2 * d ** 2 * delta ** 3) ** -0.5


def kruns_bound(n: int, k: int, sigma2: float, x: float, C: float = 1.0, C0: float = 1.0) -> BoundReport:
    """Parameters (n, n, k, k, 1/sigma) with sigma^2 the raw run-count variance"""
    if not sigma2 > 0:
        raise DomainError(f"sigma^2 must be positive, got {sigma2}")
    report = theorem1_bound((n, n, k, k, 1.0 / math.sqrt(sigma2)), x, C, C0, family="kruns")
    report.extras["sigma2"] = sigma2
    return report


def ustat_bound(m: int, s: int, sigma2: float, c1: float, x: float, C: float = 1.0, C0: float = 1.0) -> BoundReport:
    """
    Parameters (m, C(m,s), s, C(m-1,s-1), C1/sigma) for a U-statistic sum with
    |h| <= C1; the simplified range C0 m^(1/4) and rate C (1 + x^2) / sqrt(m)
    hold once sigma^2 is of order m^(2s-1).
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma^2 must be positive, got {sigma2}")
    params = (m, comb(m, s), s, comb(m - 1, s - 1), c1 / math.sqrt(sigma2))
    report = theorem1_bound(params, x, C, C0, family="ustat")
    report.extras.update(sigma2=sigma2, c1=c1,
                         simplified_range=C0 * m ** 0.25,
                         simplified_rate=C * (1.0 + x ** 2) / math.sqrt(m))
    return report


def _as_graph(G) -> nx.Graph:
    if isinstance(G, nx.Graph):
        return G
    graph = nx.Graph()
    graph.add_edges_from((int(u), int(v)) for u, v in G)
    return graph


def _check_graph_inputs(N: int, p: float, graph: nx.Graph):
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0,1), got {p}")
    if graph.number_of_edges() == 0:
        raise DomainError("pattern graph has no edges")
    v = graph.number_of_nodes()
    if v > MAX_PATTERN_VERTICES:
        raise UnsupportedSizeError(f"pattern has {v} vertices (limit {MAX_PATTERN_VERTICES})")
    if N < v:
        raise DomainError(f"N = {N} is smaller than the pattern's {v} vertices")


def subgraph_psi(N: int, p: float, G) -> float:
    """
    min over subgraphs H with e(H) > 0 of N^v(H) p^e(H).

    For a fixed vertex set the induced subgraph has the most edges, so it is
    enough to scan vertex subsets and take induced edges, ignoring isolated
    vertices.
    """
    graph = _as_graph(G)
    _check_graph_inputs(N, p, graph)
    nodes = list(graph.nodes)
    best = math.inf
    log_N, log_p = math.log(N), math.log(p)
    for size in range(2, len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            H = graph.subgraph(subset)
            e = H.number_of_edges()
            if e == 0:
                continue
            v = sum(1 for node in H.nodes if H.degree(node) > 0)
            best = min(best, v * log_N + e * log_p)
    return math.exp(best)


def _subgraph_rate(N: int, p: float, graph: nx.Graph, psi: float) -> float:
    e = graph.number_of_edges()
    return psi ** 2.5 / ((1.0 - p) ** 2.5 * p ** (5 * e) * float(N) ** 6)


def subgraph_range(N: int, p: float, G, C0: float = 1.0) -> float:
    """C0 [N^6 (1-p)^(5/2) p^(5e) / psi^(5/2)]^(1/2)"""
    graph = _as_graph(G)
    _constants(C0=C0)
    psi = subgraph_psi(N, p, graph)
    return C0 * _subgraph_rate(N, p, graph, psi) ** -0.5


def subgraph_bound(N: int, p: float, G, x: float, C_G: float = 1.0, C0: float = 1.0) -> BoundReport:
    graph = _as_graph(G)
    _constants(C_G=C_G, C0=C0)
    psi = subgraph_psi(N, p, graph)
    rate = _subgraph_rate(N, p, graph, psi)
    x_max = C0 * rate ** -0.5
    return BoundReport(
        family="subgraph",
        x=x,
        bound_value=C_G * rate * (1.0 + x ** 2),
        x_max=x_max,
        constants_used={"C(G)": C_G, "C0": C0},
        parameters={"N": N, "p": p, "v": graph.number_of_nodes(), "e": graph.number_of_edges()},
        in_range=0.0 <= x <= x_max,
        extras={"psi": psi},
    )
