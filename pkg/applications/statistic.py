"""
Built statistic: generic model, direct sampler and normalization in one record
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from common.protocol import Provenance
from localstat.dependency import StructuralParams, build_dependency
from localstat.model import LocalStatisticModel
from localstat.sampling import BaseDrawer, ModelSampler
from moments.summary import MomentSummary

logger = logging.getLogger("mdtk.applications")


class DirectSampler(BaseDrawer):
    """
    Family-specific fast path for W. Uses the same base draws as the generic
    sampler and the same (raw_total - center_total) / scale formula, so both
    agree when fed identical base values.
    """

    def __init__(self, base, center_total: float, scale: float):
        super().__init__(base)
        self.center_total = float(center_total)
        self.scale = float(scale)

    def raw_total(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def w_from_base(self, X: np.ndarray) -> np.ndarray:
        return (self.raw_total(X) - self.center_total) / self.scale

    def sample(self, rng: np.random.Generator, reps: int) -> np.ndarray:
        return self.w_from_base(self.draw_base(rng, reps))


@dataclass
class Statistic:
    name: str
    spec: Any
    model: Optional[LocalStatisticModel]
    direct: Optional[DirectSampler]
    sigma2: float                              # raw variance used for normalization
    sigma_provenance: str = Provenance.COMPUTED.value
    sigma2_se: Optional[float] = None
    params: Optional[StructuralParams] = None
    moments: Optional[MomentSummary] = None
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def sampler(self):
        """Direct sampler when the family has one, else the generic model sampler"""
        return self.direct if self.direct is not None else ModelSampler(self.model)

    @property
    def scale(self) -> float:
        return self.sampler.scale if self.direct is not None else self.model.scale

    def structural_params(self) -> StructuralParams:
        if self.params is None:
            self.params = build_dependency(self.model).params()
        return self.params

    def describe(self) -> dict:
        out = {
            "name": self.name,
            "sigma2": self.sigma2,
            "sigma_provenance": self.sigma_provenance,
            "sigma2_se": self.sigma2_se,
            "notes": list(self.notes),
            **self.extras,
        }
        if self.params is not None:
            out["params"] = dict(zip(("n", "m", "s", "d", "delta"), self.params.as_tuple()))
            out["delta_source"] = self.params.delta_source
        if self.moments is not None:
            out["moments"] = self.moments.to_dict()
        return out
