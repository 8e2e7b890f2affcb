"""
Joint-support enumeration over subsets of base variables
"""

import numpy as np

from common.errors import UnsupportedSizeError

DEFAULT_JOINT_LIMIT = 1 << 20


def joint_size(base, variables) -> int:
    size = 1
    for a in variables:
        size *= base[a].size
    return size


def joint_support(base, variables, limit: int = DEFAULT_JOINT_LIMIT):
    """
    All joint configurations of X restricted to `variables`.

    Returns:
        (values, probs): values has shape (K, len(variables)) in
        itertools.product order (last variable fastest); probs has shape (K,)
        and is computed as exp of summed log-probabilities.
    """
    variables = list(variables)
    size = joint_size(base, variables)
    if size > limit:
        raise UnsupportedSizeError(f"joint support of {len(variables)} variables has {size} points (limit {limit})")
    if not variables:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*[np.arange(base[a].size) for a in variables], indexing="ij")
    codes = np.stack([g.ravel() for g in grids], axis=1)
    values = np.empty(codes.shape, dtype=np.float64)
    logp = np.zeros(codes.shape[0], dtype=np.float64)
    for col, a in enumerate(variables):
        values[:, col] = base[a].values[codes[:, col]]
        logp += base[a].log_probs[codes[:, col]]
    return values, np.exp(logp)
