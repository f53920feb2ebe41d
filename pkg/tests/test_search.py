import numpy as np
import pytest

from skbounds.constructions import monotone_split
from skbounds.envelope import psi_hat_envelope
from skbounds.errors import CapacityError, InfeasibleError, SKBoundsError
from skbounds.probkit import (
    FunctionTable,
    JointPmf,
    apply_function,
    conditional_mutual_information as cmi,
    entropy,
)
from skbounds.search import (
    SearchConfig,
    grid_oracle,
    interactive_lower_bound,
    intrinsic_information,
    psi_delta_evaluate,
    psi_delta_sweep,
    psi_hat_search,
    ribbon_margin,
    sow_evaluate,
)
from skbounds.search.gradcheck import gradient_errors, objective_catalog

from conftest import L_PLUS, law

FAST = SearchConfig(restarts=2, max_iter=400)


def xor_of(m):
    return apply_function(law("XY", m), FunctionTable.xor())


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)
        with pytest.raises(ValueError):
            SearchConfig(tol=0.0)
        with pytest.raises(ValueError):
            SearchConfig(j_card=0)

    def test_with(self):
        assert FAST.with_(seed=3).seed == 3 and FAST.with_(seed=3).restarts == 2


class TestPsiHatSearch:
    def test_single_symbol_j(self, and_lplus):
        r = psi_hat_search(and_lplus, FAST.with_(j_card=1))
        assert r.value == pytest.approx(cmi(and_lplus, "X", "Y"), abs=1e-12)

    def test_and_alpha_split(self, and_lplus):
        w = monotone_split(law("XY", L_PLUS), "AND")
        r = psi_hat_search(and_lplus, FAST, witnesses=[w])
        assert r.value <= 1e-6

    def test_agrees_with_envelope_on_xor(self):
        rng = np.random.default_rng(11)
        for i in range(20):
            p = xor_of(rng.dirichlet(np.ones(4)).reshape(2, 2))
            s = psi_hat_search(p, FAST.with_(seed=i)).value
            e = psi_hat_envelope(p, 40).value
            assert s == pytest.approx(e, abs=2e-3)

    def test_baseline_dominance(self, rng):
        for i in range(5):
            p = law("XYZ", rng.dirichlet(np.ones(12)).reshape(2, 3, 2))
            v = psi_hat_search(p, FAST.with_(seed=i)).value
            assert v <= min(cmi(p, "X", "Y"), cmi(p, "X", "Y", "Z")) + 1e-9

    def test_reproducible(self, and_lplus):
        a = psi_hat_search(and_lplus, FAST.with_(seed=5))
        b = psi_hat_search(and_lplus, FAST.with_(seed=5))
        assert a.value == b.value
        np.testing.assert_array_equal(a.witness, b.witness)

    def test_caveat_noted(self, xor_lplus):
        assert any("cardinality" in n for n in psi_hat_search(xor_lplus, FAST).notes)


class TestOracle:
    def test_single_symbol(self, xor_lplus):
        assert grid_oracle(xor_lplus, 1, 3) == pytest.approx(cmi(xor_lplus, "X", "Y"), abs=1e-12)

    def test_independent_xor(self):
        assert abs(grid_oracle(xor_of(np.full((2, 2), 0.25)), 2, 10)) <= 1e-12

    def test_and_split_near_grid(self, and_lplus):
        assert grid_oracle(and_lplus, 2, 50) <= 1e-3

    def test_cap(self, and_lplus):
        with pytest.raises(CapacityError):
            grid_oracle(and_lplus, 4, 50)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_sandwich(self, seed):
        rng = np.random.default_rng(seed)
        f = (FunctionTable.and_(), FunctionTable.xor(), FunctionTable.sum_())[seed]
        p = apply_function(law("XY", rng.dirichlet(np.ones(4)).reshape(2, 2)), f)
        o = grid_oracle(p, 2, 50)
        s = psi_hat_search(p, SearchConfig(seed=seed)).value
        assert o >= s - 1e-9
        assert o <= s + 5e-3


class TestIntrinsic:
    def test_independent_z(self):
        p = JointPmf.product(law("XY", L_PLUS), law("Z", [0.3, 0.7]))
        r = intrinsic_information(p, FAST)
        assert r.value <= min(cmi(p, "X", "Y"), cmi(p, "X", "Y", "Z")) + 1e-9
        assert r.value == pytest.approx(cmi(p, "X", "Y"), abs=1e-9)

    def test_z_is_xy(self):
        m = np.zeros((2, 2, 4))
        for i, (x, y) in enumerate(np.ndindex(2, 2)):
            m[x, y, i] = L_PLUS[x][y]
        assert intrinsic_information(law("XYZ", m), FAST).value <= 1e-9

    def test_xor_uniform(self):
        assert abs(intrinsic_information(xor_of(np.full((2, 2), 0.25)), FAST).value) <= 1e-9

    def test_and_positive_cov_vanishes(self, and_lplus):
        # a stochastic P_{J|Z} can route part of the (1,1) mass into the Z=0 group
        v = intrinsic_information(and_lplus, FAST).value
        assert -1e-9 <= v <= 1e-6
        assert cmi(and_lplus, "X", "Y", "Z") > 0.02


class TestOneWay:
    def test_constant_z(self):
        p = JointPmf.product(law("XY", L_PLUS), law("Z", [1.0]))
        assert sow_evaluate(p, "X->Y", FAST).value == pytest.approx(cmi(p, "X", "Y"), abs=1e-9)

    def test_copy_independent_z(self):
        m = np.einsum("xy,z->xyz", np.diag([0.3, 0.7]), [0.5, 0.5])
        assert sow_evaluate(law("XYZ", m), "X->Y", FAST).value == pytest.approx(entropy(law("X", [0.3, 0.7]), "X"),
                                                                                abs=1e-9)

    def test_erasure(self):
        from skbounds.constructions import erasure_capacity, erasure_source

        px = law("X", np.full(4, 0.25))
        p = erasure_source(px, [0, 1, 0, 1], 0.5)
        assert sow_evaluate(p, "X->Y", FAST).value == pytest.approx(erasure_capacity(px, [0, 1, 0, 1], 0.5),
                                                                    abs=1e-3)

    def test_direction_swap(self, and_lplus):
        a = sow_evaluate(and_lplus, "Y->X", FAST).value
        b = sow_evaluate(and_lplus, "X->Y", FAST).value
        assert a == pytest.approx(b, abs=1e-6)  # the law is symmetric in X and Y


class TestPsiDelta:
    def test_zero_matches_search(self, xor_lplus):
        r = psi_delta_evaluate(xor_lplus, 0.0, FAST)
        assert r.value == pytest.approx(psi_hat_search(xor_lplus, FAST.with_(j_card=4)).value, abs=5e-3)
        assert any("heuristic" in n for n in r.notes)

    def test_monotone(self, and_lplus):
        vals = [r.value for r in psi_delta_sweep(and_lplus, [0.0, 0.1, 0.2], FAST)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        xs = [r.value for r in psi_delta_sweep(apply_function(law("XY", L_PLUS), FunctionTable.xor()),
                                               [0.0, 0.1, 0.2], FAST)]
        assert all(b <= a for a, b in zip(xs, xs[1:]))

    def test_full_leakage(self, xor_lplus):
        hz = entropy(xor_lplus, "Z")
        top, zero = psi_delta_sweep(xor_lplus, [hz, 0.0], FAST)
        assert top.value <= zero.value
        assert top.residuals["constraint"] <= 1e-6

    def test_infeasible(self, xor_lplus):
        with pytest.raises(InfeasibleError):
            psi_delta_evaluate(xor_lplus, entropy(xor_lplus, "Z") + 0.1, FAST)


class TestRibbon:
    def test_zero_lambda(self, and_lplus):
        assert ribbon_margin(and_lplus, (0.0, 0.0, 0.0), FAST).value == pytest.approx(0.0, abs=1e-9)

    def test_half_on_xor(self, rng):
        for i in range(5):
            p = xor_of(rng.dirichlet(np.ones(4)).reshape(2, 2))
            assert ribbon_margin(p, (0.5, 0.5, 0.5), FAST.with_(seed=i)).value >= -1e-3

    def test_range(self, and_lplus):
        with pytest.raises(ValueError):
            ribbon_margin(and_lplus, (1.5, 0.0, 0.0), FAST)


class TestInteractive:
    def test_independent_z(self):
        p = JointPmf.product(law("XY", L_PLUS), law("Z", [0.5, 0.5]))
        assert interactive_lower_bound(p, 1, 1, FAST).value == pytest.approx(cmi(p, "X", "Y"), abs=1e-9)

    def test_matches_sow_with_constant_v(self, xor_lplus):
        a = interactive_lower_bound(xor_lplus, 1, 1, FAST).value
        b = sow_evaluate(xor_lplus, "X->Y", FAST.with_(v_card=1)).value
        assert a == pytest.approx(b, abs=1e-9)

    def test_depth_two_nests(self, and_lplus):
        one = interactive_lower_bound(and_lplus, 1, 1, FAST).value
        two = interactive_lower_bound(and_lplus, 2, 1, FAST).value
        assert two >= one - 1e-6

    def test_depth_limit(self, and_lplus):
        with pytest.raises(SKBoundsError):
            interactive_lower_bound(and_lplus, 3, 1, FAST)


def test_gradients_match_finite_differences(rng):
    p = law("XYZ", 0.5 * rng.dirichlet(np.ones(8)).reshape(2, 2, 2) + 0.5 / 8)
    for name, model, obj in objective_catalog(p, rng):
        ks = [0.5 * k + 0.5 / k.shape[-1] for k in model.random_kernels(rng)]
        rel, ab, norm = gradient_errors(model, obj, ks)
        assert rel <= 1e-6 or (norm < 1e-4 and ab <= 1e-9), name
