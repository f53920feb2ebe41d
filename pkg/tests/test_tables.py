import numpy as np
import pytest
from hypothesis import given, strategies as st

from skbounds.errors import CapacityError, PreconditionError
from skbounds.probkit import FunctionTable
from skbounds.tables import classify_table, enumerate_tables, falsify_invalid, table_from_index


def T(rows):
    return FunctionTable.from_symbols(rows)


class TestClassify:
    def test_xor(self):
        assert classify_table(T([["A", "B"], ["B", "A"]])).kind == "ValidXor"

    def test_constant(self):
        assert classify_table(T([["A"] * 3] * 3)).kind == "ValidConstant"

    def test_and_invalid(self):
        c = classify_table(T([["A", "A"], ["A", "B"]]))
        assert c.kind == "Invalid" and c.rows == (0, 1) and c.cols == (0, 1)

    def test_first_subtable_in_scan_order(self):
        c = classify_table(T([["A", "A", "A"], ["A", "A", "B"]]))
        assert (c.rows, c.cols) == ((0, 1), (0, 2))

    def test_singleton_axis(self):
        with pytest.raises(PreconditionError):
            classify_table(T([["A", "B"]]))

    @given(st.integers(2, 3), st.integers(2, 3), st.integers(1, 4), st.data())
    def test_relabel_invariance(self, nx, ny, nz, data):
        idx = data.draw(st.integers(0, nz ** (nx * ny) - 1))
        t = table_from_index(idx, nx, ny, nz)
        perm = data.draw(st.permutations(range(nz)))
        assert classify_table(t).kind == classify_table(t.relabeled(perm)).kind


class TestEnumerate:
    def test_counts(self):
        assert enumerate_tables(2, 2, 2)["valid"] == 4
        assert enumerate_tables(2, 3, 2)["valid"] == 2
        for nx, ny in ((2, 2), (3, 3)):
            assert enumerate_tables(nx, ny, 1)["valid"] == 1

    def test_constants_only_off_2x2(self):
        for nz in (2, 3):
            c = enumerate_tables(3, 2, nz)
            assert c["valid"] == nz == c["constant"]

    def test_listing_agrees_with_classifier(self):
        c = enumerate_tables(2, 2, 3, listing=True)
        want = [i for i in range(3 ** 4) if classify_table(table_from_index(i, 2, 2, 3)).valid]
        np.testing.assert_array_equal(c["valid_indices"], want)

    def test_cap(self):
        with pytest.raises(CapacityError):
            enumerate_tables(3, 3, 7, cap=1000)


class TestFalsify:
    def test_and(self):
        f = falsify_invalid(T([["A", "A"], ["A", "B"]]))
        assert f.succeeded and f.psi_hat <= 1e-6
        assert f.mutual_information == pytest.approx(0.278071905, abs=1e-9)

    def test_one_to_one(self):
        f = falsify_invalid(T([["A", "B"], ["C", "D"]]))
        assert f.succeeded and f.gap >= 1e-3

    def test_z1_pattern(self):
        f = falsify_invalid(T([["A", "B"], ["B", "C"]]))
        assert f.succeeded and f.gap >= 1e-3

    def test_embedded_in_larger_table(self):
        f = falsify_invalid(T([["A", "A", "A"], ["A", "A", "B"], ["A", "A", "A"]]))
        assert f.succeeded and f.law.mass.shape == (3, 3)

    def test_valid_rejected(self):
        with pytest.raises(PreconditionError):
            falsify_invalid(T([["A", "B"], ["B", "A"]]))
