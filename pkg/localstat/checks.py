"""
Structural checks on built models: Efron-Stein sum and the parameter inequalities
"""

import math
from dataclasses import dataclass, field

import numpy as np

from common.protocol import Record
from .dependency import DependencyStructure, build_dependency
from .enumeration import joint_support, DEFAULT_JOINT_LIMIT
from .model import LocalStatisticModel

REL_TOL = 1e-9


def _swap_differences(model: LocalStatisticModel, deps: DependencyStructure, alpha: int, limit: int):
    """
    Enumerate W - W^{alpha} where X_alpha is replaced by an independent copy.

    Returns:
        (diff, probs): flattened over (configuration of the touched variables, copy value)
    """
    owners = deps.N_alpha[alpha]
    if owners.size == 0:
        return np.zeros(1), np.ones(1)
    variables = deps.union_vars(tuple(int(i) for i in owners))
    values, probs = joint_support(model.base, variables, limit)
    spec = model.base[alpha]
    col = int(np.searchsorted(variables, alpha))
    diffs, weights = [], []
    for copy_value, copy_prob in zip(spec.support, spec.probs):
        swapped = values.copy()
        swapped[:, col] = copy_value
        delta = np.zeros(values.shape[0])
        for i in owners:
            pos = np.searchsorted(variables, model.index_sets[i])
            delta += model.xi(i, values[:, pos]) - model.xi(i, swapped[:, pos])
        diffs.append(delta)
        weights.append(probs * copy_prob)
    return np.concatenate(diffs), np.concatenate(weights)


def efron_stein_sum(model: LocalStatisticModel, deps: DependencyStructure = None,
                    limit: int = DEFAULT_JOINT_LIMIT) -> float:
    """C_2 = sum_alpha E (W - W^{alpha})^2 by enumeration"""
    deps = deps or build_dependency(model)
    terms = []
    for alpha in range(model.m):
        diff, probs = _swap_differences(model, deps, alpha, limit)
        terms.append(math.fsum((probs * diff ** 2).tolist()))
    return math.fsum(terms)


def max_swap_difference(model: LocalStatisticModel, deps: DependencyStructure = None,
                        limit: int = DEFAULT_JOINT_LIMIT) -> float:
    """max over alpha and configurations of |W - W^{alpha}|"""
    deps = deps or build_dependency(model)
    return max(float(np.max(np.abs(_swap_differences(model, deps, a, limit)[0]))) for a in range(model.m))


@dataclass
class InequalityReport(Record):
    values: dict = field(default_factory=dict)
    holds: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.holds.values())

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["ok"] = self.ok
        return out


def check_parameter_inequalities(model: LocalStatisticModel, deps: DependencyStructure,
                                 var_W: float, gamma: float, efron_stein: bool = True) -> InequalityReport:
    """
    Inequalities implied by |xi_i| <= delta, |I_i| <= s, |N_alpha| <= d when Var(W) = 1:
    1 <= n delta, 1 <= n s d delta^2, |gamma| <= 4 n s^2 d^2 delta^3,
    |A_i|, |A_ij|, |A_ijk| <= 3sd, and optionally 2 <= C_2 <= 4 m d^2 delta^2 and
    |W - W^{alpha}| <= 2 d delta.
    """
    p = deps.params()
    n, m, s, d, delta = p.n, p.m, p.s, p.d, p.delta
    slack = 1.0 + REL_TOL
    report = InequalityReport()
    report.values.update(n_delta=n * delta, var_W=var_W, nsd_delta2=n * s * d * delta ** 2,
                         gamma=gamma, gamma_cap=4 * n * s ** 2 * d ** 2 * delta ** 3)
    report.holds["n_delta"] = 1.0 <= n * delta * slack
    report.holds["variance"] = var_W <= n * s * d * delta ** 2 * slack
    report.holds["gamma"] = abs(gamma) <= 4 * n * s ** 2 * d ** 2 * delta ** 3 * slack

    cap = 3 * s * d
    largest = 0
    for i in range(n):
        largest = max(largest, len(deps.A[i]))
        for j in deps.A[i]:
            aij = deps.A_ij(i, int(j))
            largest = max(largest, len(aij))
            # k ranges over A_i only
            for k in deps.A[i]:
                largest = max(largest, len(deps.A_ijk(i, int(j), int(k))))
    report.values["max_neighborhood"] = largest
    report.values["neighborhood_cap"] = cap
    report.holds["neighborhoods"] = largest <= cap

    if efron_stein:
        c2 = efron_stein_sum(model, deps)
        swap = max_swap_difference(model, deps)
        report.values.update(efron_stein=c2, efron_stein_cap=4 * m * d ** 2 * delta ** 2,
                             max_swap=swap, swap_cap=2 * d * delta)
        report.holds["efron_stein_lower"] = c2 * slack >= 2.0 * var_W
        report.holds["efron_stein_upper"] = c2 <= 4 * m * d ** 2 * delta ** 2 * slack
        report.holds["swap"] = swap <= 2 * d * delta * slack
    return report
