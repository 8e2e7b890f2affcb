import json

import mpmath
import numpy as np
import pytest

from applications import KRunsSpec, build_kruns
from common.config import load_config
from localstat import BaseVariableSpec, make_model, builtin_summand

mpmath.mp.dps = 50


@pytest.fixture
def config():
    return load_config()


@pytest.fixture
def small_config(tmp_path):
    """Defaults file with small Monte Carlo sizes, also usable through --config"""
    path = tmp_path / "defaults.json"
    path.write_text(json.dumps({"moments": {"mc_reps": 5000}, "experiment": {"block_size": 2048}}),
                    encoding="utf-8")
    cfg = load_config(path)
    cfg["path"] = str(path)
    return cfg


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def kruns6():
    return build_kruns(KRunsSpec(6, 2, 0.3))


@pytest.fixture
def chain_model():
    """Products of neighbouring centered Bernoulli variables on a path, m = 5"""
    base = (BaseVariableSpec.centered_bernoulli(0.4),) * 5
    return make_model(base, [[i, i + 1] for i in range(4)], builtin_summand("ustat-product"), name="chain")


def mp_normal_tail(x) -> mpmath.mpf:
    return mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2


def mp_poisson_upper(k: int, lam) -> mpmath.mpf:
    """P(Y > k) for Y ~ Poisson(lam)"""
    lam = mpmath.mpf(lam)
    return 1 - mpmath.fsum(mpmath.exp(-lam) * lam ** j / mpmath.factorial(j) for j in range(k + 1))
