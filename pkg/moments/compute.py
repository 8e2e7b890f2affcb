"""
Moment method selection: analytic > exact enumeration > Monte Carlo
"""

import logging
from typing import Callable, Optional

from common.config import load_config
from common.errors import UnsupportedMethodError
from common.protocol import MomentMethod
from localstat.dependency import build_dependency
from localstat.sampling import ModelSampler
from .exact import variance_exact, gamma_exact, exact_cost
from .montecarlo import moments_mc
from .summary import MomentSummary

logger = logging.getLogger("mdtk.moments")

AUTO = "auto"


def exact_feasible(model, deps=None, config: dict = None) -> tuple:
    """(feasible, reason) against the configured triple and grid limits"""
    config = config or load_config()
    cost = exact_cost(model, deps)
    if cost["triples"] > config["moments"]["exact_max_triples"]:
        return False, f"{cost['triples']} triple expectations exceed {config['moments']['exact_max_triples']}"
    if cost["max_joint"] > config["enumeration"]["joint_limit"]:
        return False, f"joint grids up to {cost['max_joint']} points exceed {config['enumeration']['joint_limit']}"
    return True, f"{cost['pairs']} pairs, {cost['triples']} triples"


def exact_moments_summary(model, deps=None, workers: int = 1, config: dict = None) -> MomentSummary:
    config = config or load_config()
    deps = deps or build_dependency(model)
    kwargs = dict(workers=workers, chunk=config["moments"]["exact_chunk"], limit=config["enumeration"]["joint_limit"])
    var_W = variance_exact(model, deps, **kwargs)
    gamma = gamma_exact(model, deps, **kwargs)
    return MomentSummary(sigma2=model.scale ** 2 * var_W, var_W=var_W, gamma=gamma, method=MomentMethod.EXACT)


def compute_moments(model=None, method: str = AUTO, analytic: Optional[Callable[[], MomentSummary]] = None,
                    sampler=None, seed: int = None, lanes: int = 1, reps: int = None, workers: int = 1,
                    config: dict = None, progress: bool = False) -> MomentSummary:
    """
    Args:
        model: generic model (needed for exact enumeration, and for MC without a sampler)
        method: auto | analytic | exact | mc
        analytic: zero-argument callable producing the closed-form summary, if the family has one
        sampler: direct sampler for Monte Carlo; defaults to the generic model sampler
    """
    config = config or load_config()
    method = MomentMethod.MONTE_CARLO.value if method == "mc" else method
    method = MomentMethod.EXACT.value if method == "exact" else method
    notes = []

    if method in (AUTO, MomentMethod.ANALYTIC.value) and analytic is not None:
        summary = analytic()
        summary.notes.append("method: analytic")
        return summary
    if method == MomentMethod.ANALYTIC.value:
        raise UnsupportedMethodError("no closed form for this statistic")

    if method in (AUTO, MomentMethod.EXACT.value) and model is not None:
        deps = build_dependency(model)
        feasible, reason = exact_feasible(model, deps, config)
        if feasible or method == MomentMethod.EXACT.value:
            try:
                summary = exact_moments_summary(model, deps, workers, config)
                summary.notes.append(f"method: exact enumeration ({reason})")
                return summary
            except UnsupportedMethodError as e:
                reason = str(e)
        logger.warning(f"Exact moments unavailable for {model.name}: {reason}; falling back to Monte Carlo")
        notes.append(f"exact moments unavailable ({reason}); fell back to Monte Carlo")
    elif method == MomentMethod.EXACT.value:
        raise UnsupportedMethodError("exact enumeration needs a generic model")

    if sampler is None:
        if model is None:
            raise UnsupportedMethodError("Monte Carlo moments need a model or a sampler")
        sampler = ModelSampler(model)
    seed = config["experiment"]["seed"] if seed is None else seed
    reps = reps or config["moments"]["mc_reps"]
    scale = model.scale if model is not None else getattr(sampler, "scale", 1.0)
    summary = moments_mc(sampler, reps, seed, lanes=lanes, scale=scale,
                         block_size=config["experiment"]["block_size"], progress=progress)
    summary.notes = notes + summary.notes
    return summary
