import numpy as np
import pytest
from hypothesis import given, strategies as st
from math import comb

from skbounds.envelope import (
    CellFunctional,
    delta_bar,
    delta_envelope,
    lower_convex_envelope,
    lower_hull_1d,
    psi_hat_envelope,
    simplex_grid,
)
from skbounds.envelope.grid import grid_size
from skbounds.errors import CapacityError, PreconditionError
from skbounds.expr import H
from skbounds.probkit import FunctionTable, JointPmf, apply_function, conditional_mutual_information as cmi, entropy
from skbounds.results import DecompositionWitness

from conftest import L_PLUS, law, pmfs


def h2(p):
    return float(-(p * np.log2(p) + (1 - p) * np.log2(1 - p)))


class TestGrid:
    def test_small(self):
        np.testing.assert_allclose(simplex_grid(2, 2).atoms, [[0, 1], [0.5, 0.5], [1, 0]])
        assert len(simplex_grid(3, 2).atoms) == 6
        np.testing.assert_array_equal(simplex_grid(1, 7).atoms, [[1.0]])

    @given(st.integers(1, 5), st.integers(1, 12))
    def test_count_and_sums(self, d, k):
        g = simplex_grid(d, k)
        assert len(g.atoms) == comb(k + d - 1, d - 1) == grid_size(d, k)
        np.testing.assert_allclose(g.atoms.sum(axis=1), 1.0, atol=1e-15)
        assert (g.counts.sum(axis=1) == k).all()

    def test_lexicographic(self):
        c = simplex_grid(3, 3).counts
        assert [tuple(r) for r in c] == sorted(tuple(r) for r in c)

    def test_cap(self):
        with pytest.raises(CapacityError):
            simplex_grid(10, 80, cap=1000)


class TestEnvelope:
    @staticmethod
    def functional(fn):
        class F:
            def __call__(self, atoms):
                return fn(atoms[:, 0])
        return F()

    def test_convex(self):
        r = lower_convex_envelope(self.functional(lambda q: q * q - q), np.array([0.5, 0.5]), simplex_grid(2, 10))
        assert r.value == pytest.approx(-0.25, abs=1e-12)

    def test_concave_arch(self):
        r = lower_convex_envelope(self.functional(lambda q: 4 * q * (1 - q)), np.array([0.5, 0.5]),
                                  simplex_grid(2, 10))
        assert r.value == pytest.approx(0.0, abs=1e-12)

    def test_linear(self):
        r = lower_convex_envelope(self.functional(lambda q: 3 * q - 1), np.array([0.37, 0.63]),
                                  simplex_grid(2, 10))
        assert r.value == pytest.approx(3 * 0.37 - 1, abs=1e-12)

    @given(pmfs((2, 2)), st.integers(1, 12))
    def test_caratheodory_and_barycenter(self, m, k):
        phi = CellFunctional(H("X") - 2 * H("X", "Y"), ("X", "Y"), (2, 2), np.arange(4))
        r = lower_convex_envelope(phi, m.ravel(), simplex_grid(4, k), extra_atoms=m.ravel()[None])
        assert len(r.atoms) <= 5
        assert r.weights.sum() == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(r.weights @ r.atoms, m.ravel(), atol=1e-9)
        assert r.value <= phi(m.ravel()[None])[0] + 1e-9

    def test_grid_atom_target(self):
        phi = CellFunctional(-H("X", "Y"), ("X", "Y"), (2, 2), np.arange(4))
        g = simplex_grid(4, 8)
        t = g.atoms[17]
        assert lower_convex_envelope(phi, t, g).value <= phi(t[None])[0] + 1e-9


class TestPsiHat:
    def test_independent_xor(self):
        p = apply_function(law("XY", np.full((2, 2), 0.25)), FunctionTable.xor())
        assert abs(psi_hat_envelope(p).value) <= 1e-9

    def test_and_lplus(self, and_lplus):
        assert abs(psi_hat_envelope(and_lplus).value) <= 1e-6

    def test_xor_lplus(self, xor_lplus):
        assert psi_hat_envelope(xor_lplus).value == pytest.approx(1 - h2(0.2), abs=2e-3)

    def test_certificate_roundtrip(self, xor_lplus):
        r = psi_hat_envelope(xor_lplus, 20, certify=True)
        assert isinstance(r.witness, DecompositionWitness)
        j = r.witness.joint()
        val = cmi(j, "X", "Y", "J") + cmi(j, ("X", "Y"), "J", "Z")
        assert val == pytest.approx(r.value, abs=1e-9)
        assert r.residuals["barycenter"] <= 1e-9
        assert r.meta["lower"] <= r.value + 1e-12
        assert r.meta["slack"] >= 0

    def test_ladder_nonincreasing(self, rng):
        p = apply_function(law("XY", rng.dirichlet(np.ones(4)).reshape(2, 2)), FunctionTable.and_())
        r = psi_hat_envelope(p, tol=0.0)
        vals = [t["value"] for t in r.trace if "value" in t]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))

    def test_baseline_dominance_fuzz(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            p = law("XYZ", rng.dirichlet(np.ones(6)).reshape(2, 1, 3))
            v = psi_hat_envelope(p, 4).value
            assert v <= min(cmi(p, "X", "Y"), cmi(p, "X", "Y", "Z")) + 1e-9

    @pytest.mark.parametrize("shape", [(2, 2, 2), (2, 3, 2)])
    def test_baseline_dominance_general_z(self, shape, rng):
        for _ in range(5):
            p = law("XYZ", rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape))
            if len(p.support()) - 1 > 7:
                with pytest.raises(CapacityError):
                    psi_hat_envelope(p, 4)
                continue
            v = psi_hat_envelope(p, 6).value
            assert v <= min(cmi(p, "X", "Y"), cmi(p, "X", "Y", "Z")) + 1e-9

    def test_needs_z(self):
        with pytest.raises(PreconditionError):
            psi_hat_envelope(law("XY", L_PLUS))


class TestDelta:
    def test_hull_1d(self):
        xs = np.linspace(0, 1, 11)
        hx, hy = lower_hull_1d(xs, np.sin(np.pi * xs))
        np.testing.assert_allclose(hx, [0, 1])

    def test_independent_uniform(self):
        p = law("XY", np.full((2, 2), 0.25))
        assert abs(delta_envelope(p, "from-X").value) <= 1e-9
        assert abs(delta_bar(p).value) <= 1e-9

    def test_mixed_sign_zero(self):
        # P(Y=0|X=0) = 0.9, P(Y=1|X=1) = 0.3, balancing P_X
        c, d = 0.9, 0.3
        x = np.sqrt(d * (1 - d)) / (np.sqrt(d * (1 - d)) + np.sqrt(c * (1 - c)))
        p = law("XY", [[x * c, x * (1 - c)], [(1 - x) * (1 - d), (1 - x) * d]])
        assert abs(delta_bar(p).value) <= 1e-9

    def test_equal_cd(self):
        p = law("XY", [[0.45, 0.05], [0.05, 0.45]])
        ref = 2 * h2(0.1) - entropy(p, ("X", "Y"))
        assert delta_bar(p).value == pytest.approx(ref, abs=1e-6)

    def test_variants_reported(self):
        c, d = 0.9, 0.3
        p = law("XY", [[0.5 * c, 0.5 * (1 - c)], [0.5 * (1 - d), 0.5 * d]])
        r = delta_bar(p)
        assert "delta1_other_variant" in r.meta
        assert r.meta["variant_gap"] == pytest.approx(r.meta["delta1_other_variant"] - r.meta["delta1"])

    def test_general_alphabet_grid_path(self, rng):
        p = law("XY", rng.dirichlet(np.ones(9)).reshape(3, 3))
        z = apply_function(p, FunctionTable(np.add.outer(np.arange(3), np.arange(3)) % 3))
        a = delta_envelope(z, "from-X", ladder=(6, 12)).value  # ternary X: simplex grid
        b = delta_envelope(p, "from-X", ladder=(6, 12)).value
        assert a == pytest.approx(b, abs=1e-12)
        # the envelope lies below phi(P) = H(Z) - H(Y)
        assert a <= entropy(z, "Z") - entropy(z, "Y") + 1e-9

    def test_not_xor(self, and_lplus):
        with pytest.raises(PreconditionError):
            delta_envelope(and_lplus, "from-X")
