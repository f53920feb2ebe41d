import numpy as np
import pytest

from skbounds.envelope import delta_bar
from skbounds.errors import PreconditionError
from skbounds.probkit import ConditionalPmf, FunctionTable, JointPmf, apply_function, attach_channel
from skbounds.search import SearchConfig
from skbounds.verifiers import (
    FuzzSpec,
    ProtocolMaps,
    km_bound_check,
    rectangle_check,
    set_partitions,
    tensorization_check,
    th1_identity_check,
    th1_sides,
    thm5_check,
)

from conftest import L_PLUS, law

SIZES = {"X": 2, "Y": 2, "Z": 2, "T": 2, "J": 2}


def five(rng, t_const=False, j_const=False):
    p = law("XYZ", rng.dirichlet(np.ones(8)).reshape(2, 2, 2))
    for name, const in (("T", t_const), ("J", j_const)):
        rows = np.ones((2, 2, 2, 1)) if const else rng.dirichlet(np.ones(2), size=8).reshape(2, 2, 2, 2)
        p = attach_channel(p, ConditionalPmf(("X", "Y", "Z"), (name,), rows))
    return p


class TestIdentity:
    def test_degenerate_t(self, rng):
        lhs, rhs = th1_sides(five(rng, t_const=True))
        assert abs(lhs - rhs) <= 1e-12

    def test_degenerate_j(self, rng):
        lhs, rhs = th1_sides(five(rng, j_const=True))
        assert abs(lhs - rhs) <= 1e-12

    def test_fuzz(self):
        assert th1_identity_check(FuzzSpec(1, 200, SIZES)).max_discrepancy <= 1e-9

    def test_holds_without_coupling(self):
        r = th1_identity_check(FuzzSpec(2, 50, {"X": 2, "Y": 3, "Z": 2, "T": 3, "J": 2}), coupled=False)
        assert r.max_discrepancy <= 1e-9

    def test_size_limit(self):
        with pytest.raises(ValueError):
            th1_identity_check(FuzzSpec(0, 1, {"X": 4}))

    def test_deterministic(self):
        a = th1_identity_check(FuzzSpec(3, 20, SIZES))
        b = th1_identity_check(FuzzSpec(3, 20, SIZES))
        assert a == b


class TestThm5:
    def test_small_fuzz(self):
        r = thm5_check(FuzzSpec(0, 5), k=8)
        assert not r.violations
        assert all(row["slack"] >= 0 for row in r.rows)

    def test_fuzzspec_validation(self):
        with pytest.raises(ValueError):
            FuzzSpec(trials=0)


class TestTensorization:
    def test_independent_xor(self):
        r = tensorization_check(apply_function(law("XY", np.full((2, 2), 0.25)), FunctionTable.xor()),
                                SearchConfig(restarts=1, max_iter=300))
        assert abs(r.iid_value) <= 1e-12 and abs(r.search_best) <= 1e-9

    def test_and_split(self, and_lplus):
        r = tensorization_check(and_lplus, SearchConfig(restarts=1, max_iter=300))
        assert abs(r.iid_value) <= 1e-12

    def test_xor_lplus(self, xor_lplus):
        r = tensorization_check(xor_lplus, SearchConfig(restarts=1, max_iter=300))
        assert r.iid_residual <= 1e-12
        assert r.gap >= -1e-3

    def test_needs_function(self, rng):
        with pytest.raises(PreconditionError):
            tensorization_check(law("XYZ", rng.dirichlet(np.ones(8)).reshape(2, 2, 2)))


class TestRectangle:
    def test_partitions(self):
        assert len(list(set_partitions(4, 4))) == 15
        assert len(list(set_partitions(4, 2))) == 8

    def test_exhaustive_n1(self):
        r = rectangle_check(2, 2, 1, law=np.array(L_PLUS))
        assert r.exhaustive and not r.counterexamples
        assert r.antecedent_true >= 1  # identity maps reveal everything

    def test_n2_and_ternary(self):
        assert not rectangle_check(2, 2, 2, seed=5).counterexamples
        assert not rectangle_check(3, 2, 1, seed=5).counterexamples

    def test_sampled_path(self):
        r = rectangle_check(3, 3, 2, seed=1, pair_cap=10, samples=500)
        assert not r.exhaustive and r.pairs_checked == 500 and not r.counterexamples

    def test_support(self):
        with pytest.raises(PreconditionError):
            rectangle_check(2, 2, 1, law=np.array([[0.5, 0.0], [0.0, 0.5]]))


class TestKM:
    def test_identity_and_constant_uniform(self):
        u = law("XY", np.full((2, 2), 0.25))
        assert km_bound_check(u, ProtocolMaps(1, (0, 1), (0, 1))) == pytest.approx(0.0, abs=1e-12)
        assert km_bound_check(u, ProtocolMaps(1, (0, 0), (0, 0))) == pytest.approx(0.0, abs=1e-12)

    def test_sweep(self):
        p = law("XY", [[0.45, 0.05], [0.05, 0.45]])
        dbar = delta_bar(p).value
        rng = np.random.default_rng(0)
        parts2 = list(set_partitions(4, 4))
        worst = np.inf
        for _ in range(100):
            a, b = parts2[rng.integers(15)], parts2[rng.integers(15)]
            worst = min(worst, km_bound_check(p, ProtocolMaps(2, a, b), dbar))
        for a in set_partitions(2, 4):
            for b in set_partitions(2, 4):
                worst = min(worst, km_bound_check(p, ProtocolMaps(1, a, b), dbar))
        assert worst >= -1e-9

    def test_block_length(self):
        with pytest.raises(ValueError):
            ProtocolMaps(3, (0,), (0,))
