"""
Moment summaries
"""

from dataclasses import dataclass, field
from typing import Optional

from common.protocol import MomentMethod, Record
from common.errors import InvalidModelError


@dataclass
class MomentSummary(Record):
    sigma2: float                        # variance before normalization (scale^2 Var W)
    var_W: float
    gamma: float                         # E W^3
    method: MomentMethod
    std_errors: Optional[tuple] = None   # (se_var, se_gamma), Monte Carlo only
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.method == MomentMethod.EXACT and self.std_errors is not None:
            raise InvalidModelError("exact moments carry no standard errors")
        if self.sigma2 < -1e-12:
            raise InvalidModelError(f"negative variance {self.sigma2}")

    @property
    def se_var(self) -> Optional[float]:
        return None if self.std_errors is None else self.std_errors[0]

    @property
    def se_gamma(self) -> Optional[float]:
        return None if self.std_errors is None else self.std_errors[1]
