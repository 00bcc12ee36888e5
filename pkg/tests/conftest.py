import numpy as np
import pytest

from wiretail.config import load_config
from wiretail.dynamics import simulate_base


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def base_traces(cfg):
    """Memoized steady-state base traces keyed by (f, k2); stiffness-free."""
    cache = {}

    def get(f: float, k2: float):
        key = (round(float(f), 9), round(float(k2), 9))
        if key not in cache:
            cache[key] = simulate_base(cfg, f=f, k2=k2)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
