"""
Summand evaluators

A summand maps (i, values of X restricted to I_i) to the raw value h_i. The
model turns it into xi_i = (h_i - center_i) / scale. Evaluators are pure and
vectorized over leading axes: values has shape (..., |I_i|).
"""

import itertools
from abc import ABC, abstractmethod

import numpy as np

from common.errors import InvalidModelError


class Summand(ABC):
    name = "summand"

    @abstractmethod
    def raw(self, i: int, values: np.ndarray) -> np.ndarray:
        ...

    def to_spec(self):
        return f"builtin:{self.name}"


class ProductSummand(Summand):
    """h = prod of the restricted values (runs, kernel products, copy indicators)"""

    def __init__(self, name: str = "kruns"):
        self.name = name

    def raw(self, i, values):
        return np.prod(values, axis=-1)


class ProductPlusLinearSummand(Summand):
    """h = prod + sum; a non-degenerate symmetric kernel on mean-zero inputs"""

    name = "ustat-product-plus-linear"

    def raw(self, i, values):
        return np.prod(values, axis=-1) + np.sum(values, axis=-1)


class IdentitySummand(Summand):
    name = "centered-identity"

    def raw(self, i, values):
        return values[..., 0]


class TableSummand(Summand):
    """
    Explicit value tables. tables[i] lists h_i over the joint support of I_i in
    itertools.product order (last variable fastest).
    """

    name = "table"

    def __init__(self, tables, supports):
        """
        Args:
            tables: per summand, flat sequence of raw values
            supports: per summand, tuple of support arrays (one per variable of I_i)
        """
        self.tables = tuple(np.asarray(t, dtype=np.float64) for t in tables)
        self.supports = tuple(tuple(np.asarray(s, dtype=np.float64) for s in sup) for sup in supports)
        self._radix = []
        for i, (table, sup) in enumerate(zip(self.tables, self.supports)):
            sizes = [len(s) for s in sup]
            expected = int(np.prod(sizes))
            if table.shape != (expected,):
                raise InvalidModelError(f"table for summand {i} has {table.size} entries, expected {expected}")
            # mixed radix, last variable fastest
            self._radix.append(np.cumprod([1] + sizes[::-1])[:-1][::-1])

    def raw(self, i, values):
        sup = self.supports[i]
        code = np.zeros(values.shape[:-1], dtype=np.int64)
        for pos, (support, weight) in enumerate(zip(sup, self._radix[i])):
            code += np.searchsorted(support, values[..., pos]) * weight
        return self.tables[i][code]

    def to_spec(self):
        return {"kind": "table", "tables": [t.tolist() for t in self.tables]}

    @classmethod
    def from_function(cls, fn, index_sets, base):
        """Tabulate fn(i, tuple_of_values) over each joint support"""
        tables, supports = [], []
        for i, idx in enumerate(index_sets):
            sup = tuple(base[a].values for a in idx)
            tables.append([fn(i, combo) for combo in itertools.product(*sup)])
            supports.append(sup)
        return cls(tables, supports)


BUILTIN_SUMMANDS = {
    "kruns": lambda: ProductSummand("kruns"),
    "ustat-product": lambda: ProductSummand("ustat-product"),
    "ustat-product-plus-linear": ProductPlusLinearSummand,
    "subgraph-indicator": lambda: ProductSummand("subgraph-indicator"),
    "centered-identity": IdentitySummand,
}


def builtin_summand(name: str) -> Summand:
    try:
        return BUILTIN_SUMMANDS[name]()
    except KeyError:
        raise InvalidModelError(f"unknown builtin summand {name!r}; known: {sorted(BUILTIN_SUMMANDS)}") from None
