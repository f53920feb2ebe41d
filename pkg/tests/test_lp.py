import numpy as np
import pytest
from hypothesis import given, strategies as st

from skbounds.envelope.lp import LinearProgram, lp_minimize
from skbounds.errors import InfeasibleError, ShapeError, UnboundedError

linprog = pytest.importorskip("scipy.optimize").linprog


def test_single_variable():
    r = lp_minimize(LinearProgram([1.0], [[1.0]], [1.0]))
    np.testing.assert_allclose(r.x, [1.0])
    assert r.value == pytest.approx(1.0)


def test_barycenter_two_atoms():
    # atoms at 0 and 1 with barycenter 0.3
    r = lp_minimize(LinearProgram([0.0, 0.0], [[1.0, 1.0], [0.0, 1.0]], [1.0, 0.3]))
    np.testing.assert_allclose(r.x, [0.7, 0.3], atol=1e-12)


def test_infeasible_with_certificate():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    b = np.array([1.0, 1.5])
    with pytest.raises(InfeasibleError) as exc:
        lp_minimize(LinearProgram([0.0, 0.0], A, b))
    y = exc.value.certificate
    # Farkas: y.A <= 0 componentwise (up to sign convention) while y.b > 0, or the reverse
    s = np.sign(y @ b)
    assert s != 0 and np.all(s * (y @ A) <= 1e-9)


def test_unbounded():
    with pytest.raises(UnboundedError):
        lp_minimize(LinearProgram([-1.0, 0.0], [[1.0, -1.0]], [0.0]))


def test_shape_error():
    with pytest.raises(ShapeError):
        LinearProgram([1.0, 2.0], [[1.0]], [1.0])


def test_redundant_rows():
    A = np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [0.0, 1.0, 2.0]])
    r = lp_minimize(LinearProgram([3.0, 1.0, 2.0], A, [1.0, 2.0, 1.0]))
    ref = linprog([3.0, 1.0, 2.0], A_eq=A, b_eq=[1.0, 2.0, 1.0], bounds=(0, None))
    assert r.value == pytest.approx(ref.fun, abs=1e-10)
    assert len(r.rows) == 2


def test_degenerate_cycling_example():
    # Beale's classic cycling instance in equality form
    c = np.array([-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0])
    A = np.array([
        [0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
        [0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    r = lp_minimize(LinearProgram(c, A, b), initial_basis=np.array([4, 5, 6]))
    assert r.value == pytest.approx(-0.05, abs=1e-10)


@given(st.integers(0, 2**31 - 1), st.integers(2, 5), st.integers(3, 30))
def test_matches_scipy_on_envelope_shaped_lps(seed, d, n):
    rng = np.random.default_rng(seed)
    atoms = rng.dirichlet(np.ones(d), size=n)
    atoms = np.vstack([np.eye(d), atoms])
    target = rng.dirichlet(np.ones(d))
    c = rng.normal(size=len(atoms))
    A = atoms.T
    r = lp_minimize(LinearProgram(c, A, target))
    ref = linprog(c, A_eq=A, b_eq=target, bounds=(0, None), method="highs")
    assert ref.status == 0
    assert r.value == pytest.approx(ref.fun, abs=1e-9)
    np.testing.assert_allclose(A @ r.x, target, atol=1e-9)
    assert r.x.min() >= 0
    assert len(r.support) <= d
