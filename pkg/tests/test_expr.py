import numpy as np
import pytest
from hypothesis import given

from skbounds.expr import H, I, evaluate, evaluate_batch, gradient, value_and_gradient
from skbounds.probkit import JointPmf, conditional_mutual_information

from conftest import pmfs

NAMES = ("X", "Y", "Z")


@given(pmfs((2, 3, 2)))
def test_matches_probkit(m):
    p = JointPmf(NAMES, m)
    assert evaluate(I("X", "Y", "Z"), m, NAMES) == pytest.approx(conditional_mutual_information(p, "X", "Y", "Z"),
                                                                    abs=1e-12)


def test_batch_matches_single(rng):
    ts = rng.dirichlet(np.ones(12), size=5).reshape(5, 2, 3, 2)
    e = I(("X", "Y"), "Z") - 0.5 * H("Y")
    np.testing.assert_allclose(evaluate_batch(e, ts, NAMES), [evaluate(e, t, NAMES) for t in ts], atol=1e-13)


def test_gradient_finite_difference(rng):
    t = rng.dirichlet(np.ones(12)).reshape(2, 3, 2) * 0.8 + 0.2 / 12
    e = I("X", "Y", "Z") + 2 * H("X", "Z")
    g = gradient(e, t, NAMES)
    v, g2 = value_and_gradient(e, t, NAMES)
    np.testing.assert_array_equal(g, g2)
    assert v == pytest.approx(evaluate(e, t, NAMES))
    h = 1e-6
    for idx in np.ndindex(t.shape):
        d = np.zeros_like(t)
        d[idx] = h
        fd = (evaluate(e, t + d, NAMES) - evaluate(e, t - d, NAMES)) / (2 * h)
        assert g[idx] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_algebra():
    e = I("X", "Y") - I("X", "Y")
    assert e.terms == {}
    assert (H("X") * 2).terms == {frozenset("X"): 2.0}
