"""
Model description files

{"m": int, "n": int, "base": [...] | {...}, "index_sets": [[...], ...],
 "summand": "builtin:<name>" | {"kind": "table", "tables": [[...], ...]},
 "center": [...] | "auto", "scale": number | "auto", "delta_bound": number}

Indices are 0-based. A single base object applies to every variable.
"""

import json
import logging
import math
import os
from typing import Union

import numpy as np

from common.errors import InvalidModelError
from .base import BaseVariableSpec
from .enumeration import joint_support
from .model import LocalStatisticModel, make_model
from .summands import TableSummand, builtin_summand

logger = logging.getLogger("mdtk.model")


def _parse_base(raw, m: int) -> tuple:
    if isinstance(raw, dict):
        spec = BaseVariableSpec.from_dict(raw)
        return (spec,) * m
    if isinstance(raw, str):
        return (BaseVariableSpec.parse(raw),) * m
    if not isinstance(raw, list) or len(raw) != m:
        raise InvalidModelError(f"base must be one spec or a list of {m} specs")
    return tuple(BaseVariableSpec.parse(b) if isinstance(b, str) else BaseVariableSpec.from_dict(b) for b in raw)


def _parse_summand(raw, index_sets, base):
    if isinstance(raw, str):
        name = raw[len("builtin:"):] if raw.startswith("builtin:") else raw
        return builtin_summand(name)
    if isinstance(raw, dict) and raw.get("kind") == "table":
        tables = raw.get("tables")
        if not isinstance(tables, list) or len(tables) != len(index_sets):
            raise InvalidModelError(f"table summand needs one table per summand ({len(index_sets)})")
        supports = [tuple(base[a].values for a in sorted(set(idx))) for idx in index_sets]
        return TableSummand(tables, supports)
    raise InvalidModelError(f"unsupported summand description {raw!r}")


def _auto_center(base, index_sets, summand) -> np.ndarray:
    """E h_i by enumeration of each joint support"""
    center = np.empty(len(index_sets))
    for i, idx in enumerate(index_sets):
        idx = sorted(set(idx))
        values, probs = joint_support(base, idx)
        center[i] = math.fsum((probs * summand.raw(i, values)).tolist())
    return center


def load_model(source: Union[str, os.PathLike, dict], name: str = None) -> LocalStatisticModel:
    """Build a model from a JSON file path or an already parsed dict"""
    if isinstance(source, dict):
        data = source
        name = name or data.get("name", "model")
    else:
        with open(source, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidModelError(f"{source}: not valid JSON ({e})") from None
        name = name or data.get("name") or os.path.splitext(os.path.basename(str(source)))[0]

    for key in ("m", "index_sets", "base", "summand"):
        if key not in data:
            raise InvalidModelError(f"model description lacks {key!r}")
    m = int(data["m"])
    index_sets = data["index_sets"]
    if "n" in data and int(data["n"]) != len(index_sets):
        raise InvalidModelError(f"n={data['n']} but {len(index_sets)} index sets given")
    for i, idx in enumerate(index_sets):
        if not idx:
            raise InvalidModelError(f"index set of summand {i} is empty")
        if min(idx) < 0 or max(idx) >= m:
            raise InvalidModelError(f"index set of summand {i} leaves [0, {m}): {idx}")

    base = _parse_base(data["base"], m)
    summand = _parse_summand(data["summand"], index_sets, base)

    center = data.get("center")
    if center == "auto":
        center = _auto_center(base, index_sets, summand)
    model = make_model(base, index_sets, summand, center=center, name=name, check=False)

    scale = data.get("scale", 1.0)
    if scale == "auto":
        from moments.exact import variance_exact
        scale = math.sqrt(variance_exact(model))
        logger.info(f"Model {name}: auto scale sqrt(Var) = {scale:.6g}")
    model = model.normalized(float(scale), data.get("delta_bound"))
    model.check_centered()
    return model


def dump_model(model: LocalStatisticModel) -> dict:
    """Inverse of load_model for builtin and table summands"""
    return {
        "name": model.name,
        "m": model.m,
        "n": model.n,
        "base": [b.to_dict() for b in model.base],
        "index_sets": [idx.tolist() for idx in model.index_sets],
        "summand": model.summand.to_spec(),
        "center": model.center.tolist(),
        "scale": model.scale,
        "delta_bound": model.delta_bound,
    }
