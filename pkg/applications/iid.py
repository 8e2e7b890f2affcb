"""
Standardized sums of i.i.d. variables
xi_i = (X_i - mu) / (sd sqrt(n))
"""

import math

from common.errors import DomainError
from common.protocol import MomentMethod
from localstat.base import BaseVariableSpec
from localstat.model import LocalStatisticModel, make_model
from localstat.summands import IdentitySummand
from moments.analytic import iid_gamma_analytic
from moments.summary import MomentSummary
from .statistic import Statistic


def iid_model(n: int, base: BaseVariableSpec) -> LocalStatisticModel:
    """Auto-standardized: the base need not have mean 0 or variance 1; the scale is recorded on the model"""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if base.variance <= 0:
        raise DomainError("i.i.d. base variable has zero variance")
    scale = math.sqrt(base.variance) * math.sqrt(n)
    return make_model((base,) * n, [[i] for i in range(n)], IdentitySummand(), center=base.mean,
                      scale=scale, name=f"iid(n={n})")


def build_iid(n: int, base: BaseVariableSpec) -> Statistic:
    model = iid_model(n, base)
    gamma = iid_gamma_analytic(n, base.variance, base.central_moment(3))
    moments = MomentSummary(sigma2=n * base.variance, var_W=1.0, gamma=gamma, method=MomentMethod.ANALYTIC)
    return Statistic(name=model.name, spec={"n": n, "base": base.to_dict()}, model=model, direct=None,
                     sigma2=n * base.variance, moments=moments)
