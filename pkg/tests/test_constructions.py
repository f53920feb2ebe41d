import numpy as np
import pytest
from hypothesis import given

from skbounds.constructions import (
    ConditionNotMet,
    SplitJ,
    erasure_capacity,
    erasure_source,
    hull_membership,
    monotone_split,
    structured_splits,
    ternary_witness,
    verify_witness,
    xor_witness,
)
from skbounds.errors import ShapeError
from skbounds.probkit import FunctionTable, JointPmf, apply_function, covariance_sign, mutual_information
from skbounds.results import DecompositionWitness

from conftest import L_MINUS, L_PLUS, law, pmfs

XOR = FunctionTable.xor()
OPS = {"AND": FunctionTable.and_(), "OR": FunctionTable.or_(), "SUM": FunctionTable.sum_()}


def residual(pxy, w, f, kind):
    return max(verify_witness(apply_function(pxy, f), w, kind).values())


class TestXor:
    def test_uniform_double_root(self):
        w = xor_witness(law("XY", np.full((2, 2), 0.25)))
        assert w.params["x0"] == pytest.approx(0.25) and w.params["x1"] == pytest.approx(0.25)
        assert w.params["lambda"] == 0.5

    def test_lplus_roots(self):
        p = law("XY", L_PLUS)
        w = xor_witness(p)
        x0, x1 = w.params["x0"], w.params["x1"]
        # roots of x^2 - 0.8x + 0.01
        np.testing.assert_allclose([x0 + x1, x0 * x1], [0.8, 0.01], atol=1e-15)
        assert w.params["lambda"] == pytest.approx(0.5)
        assert residual(p, w, XOR, "T") <= 1e-12

    def test_biased_independent_single_component(self):
        p = law("XY", np.outer([0.3, 0.7], [0.6, 0.4]))
        w = xor_witness(p)
        assert len(w) == 1
        assert residual(p, w, XOR, "T") <= 1e-12

    @given(pmfs((2, 2)))
    def test_random(self, m):
        p = law("XY", m)
        assert residual(p, xor_witness(p), XOR, "T") <= 1e-12

    def test_shape(self):
        with pytest.raises(ShapeError):
            xor_witness(law("XY", np.full((2, 3), 1 / 6)))


class TestMonotone:
    def test_alpha_split_example(self):
        w = monotone_split(law("XY", L_PLUS), "AND")
        assert isinstance(w, SplitJ)
        assert w.params["alpha"] == pytest.approx(1.6)
        assert w.params["P(J=1)"] == pytest.approx(0.625)
        mats = [q.transpose(("X", "Y", "Z")).mass.sum(axis=2) for q in w.components]
        comp = next(m for m in mats if m[0, 0] > 0)
        np.testing.assert_allclose(comp, [[0.64, 0.16], [0.16, 0.04]], atol=1e-15)
        assert comp[0, 0] * comp[1, 1] == pytest.approx(comp[0, 1] ** 2)

    def test_independent_takes_witness_path(self):
        w = monotone_split(law("XY", np.full((2, 2), 0.25)), "AND")
        assert w.kind == "T" and len(w) == 1

    def test_negative_cov(self):
        p = law("XY", L_MINUS)
        w = monotone_split(p, "SUM")
        assert w.kind == "T"
        assert residual(p, w, OPS["SUM"], "T") <= 1e-12

    @given(pmfs((2, 2)))
    def test_dispatch_and_residuals(self, m):
        p = law("XY", m)
        for op, f in OPS.items():
            w = monotone_split(p, op)
            assert (w.kind == "T") == (covariance_sign(m) <= 0)
            assert residual(p, w, f, w.kind) <= 1e-12

    def test_split_components_are_products(self):
        for q in monotone_split(law("XY", L_PLUS), "OR").components:
            assert mutual_information(q, "X", "Y") <= 1e-12

    def test_structured_splits(self, xor_lplus, and_lplus):
        assert structured_splits(xor_lplus) == []
        labels = [lab for lab, _ in structured_splits(and_lplus)]
        assert labels


class TestTernary:
    def test_uniform(self):
        p = law("XY", np.full((2, 3), 1 / 6))
        w = ternary_witness(p)
        assert isinstance(w, DecompositionWitness)
        assert w.params["alpha"] == pytest.approx(0.5)
        np.testing.assert_allclose(w.params["conditions"], [1 / 3 + 1 / 3] * 2)
        assert residual(p, w, FunctionTable.mod2_sum(2, 3), "T") <= 1e-12

    def test_violation_named(self):
        m = np.full((2, 3), 0.025)
        m[0, 0], m[1, 2] = 0.5, 0.4
        r = ternary_witness(law("XY", m))
        assert isinstance(r, ConditionNotMet) and not r
        assert r.violated == ("p00/alpha + p12/(1-alpha) <= 1",)

    @given(pmfs((2, 2)))
    def test_binary_reduction(self, m):
        full = np.zeros((2, 3))
        full[:, :2] = m
        p = law("XY", full)
        w = ternary_witness(p)
        assert isinstance(w, DecompositionWitness)
        assert residual(p, w, FunctionTable.mod2_sum(2, 3), "T") <= 1e-12
        for k in ("r", "omega", "t", "s", "ell"):
            assert 0.0 <= w.params[k] <= 1.0


class TestHull:
    def test_xor_in(self, rng):
        for _ in range(3):
            p = law("XY", rng.dirichlet(np.ones(4)).reshape(2, 2))
            v = hull_membership(p, XOR, 10)
            assert v.inside
            assert max(verify_witness(apply_function(p, XOR), v.witness, "T").values()) <= 1e-9

    def test_and_out(self):
        v = hull_membership(law("XY", L_PLUS), OPS["AND"], 40)
        assert not v.inside and "k=40" in v.message

    def test_product_in(self):
        p = law("XY", np.outer([0.3, 0.7], [0.2, 0.8]))
        v = hull_membership(p, OPS["AND"], 10)
        assert v.inside and len(v.witness) == 1


class TestVerify:
    def test_constant_witness(self):
        p = law("XY", np.outer([0.3, 0.7], [0.2, 0.8]))
        full = apply_function(p, XOR)
        w = DecompositionWitness(np.ones(1), (full,), kind="T")
        assert max(verify_witness(full, w, "T").values()) <= 1e-15

    def test_perturbed_weights(self):
        p = law("XY", L_PLUS)
        w = xor_witness(p)
        bad = DecompositionWitness(w.weights + np.array([1e-3, -1e-3]), w.components, kind="T")
        r = verify_witness(apply_function(p, XOR), bad, "T")
        assert r["barycenter"] == pytest.approx(1e-3 * abs(np.diff([c.mass.max() for c in w.components]))[0],
                                                rel=0.5) or r["barycenter"] > 1e-4


class TestErasure:
    def test_examples(self):
        px = law("X", np.full(4, 0.25))
        assert erasure_capacity(px, [0, 1, 2, 3], 1.0) == 0.0
        assert erasure_capacity(px, [0, 0, 0, 0], 0.0) == pytest.approx(2.0)
        assert erasure_capacity(px, [0, 1, 0, 1], 0.5) == pytest.approx(0.5)

    def test_source(self):
        p = erasure_source(law("X", [0.2, 0.8]), [0, 0], 0.25)
        assert p.shape == (2, 3, 1)
        assert p.mass[:, 2].sum() == pytest.approx(0.25)
