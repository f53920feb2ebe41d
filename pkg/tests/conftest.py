import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from skbounds.probkit import FunctionTable, JointPmf, apply_function

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

L_PLUS = [[0.4, 0.1], [0.1, 0.4]]
L_MINUS = [[0.1, 0.4], [0.4, 0.1]]


def law(names, mass):
    return JointPmf(tuple(names), np.asarray(mass, dtype=float))


@st.composite
def pmfs(draw, shape, floor=0.0):
    """Strictly positive random law of the given shape (Dirichlet-like via gamma draws)."""
    n = int(np.prod(shape))
    raw = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n)))
    seed = draw(st.integers(0, 2**32 - 1))
    g = np.random.default_rng(seed).gamma(1.0, size=n) * raw + 1e-3
    m = g / g.sum()
    if floor:
        m = (1 - n * floor) * m + floor
    return m.reshape(shape)


@pytest.fixture
def xor_lplus():
    return apply_function(law("XY", L_PLUS), FunctionTable.xor())


@pytest.fixture
def and_lplus():
    return apply_function(law("XY", L_PLUS), FunctionTable.and_())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
