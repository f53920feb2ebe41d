import json
import warnings

import numpy as np
import pytest
from hypothesis import given

from skbounds.errors import ParseError, RenormalizationWarning, ValidationError
from skbounds.fileio import dumps, loads, parse_distribution, write_distribution

from conftest import pmfs


def doc(pmf, **extra):
    return json.dumps({"alphabets": {"X": ["0", "1"], "Y": ["0", "1"]}, "pmf": pmf, **extra})


def test_uniform():
    d = loads(doc([[0.25, 0.25], [0.25, 0.25]]))
    assert d.pmf.names == ("X", "Y") and d.function is None
    assert d.labels["X"] == ("0", "1")


def test_function_attaches_z():
    d = loads(doc([[0.25, 0.25], [0.25, 0.25]], function=[["a", "b"], ["b", "a"]], name="xor"))
    j = d.joint
    assert j.names == ("X", "Y", "Z") and j.shape == (2, 2, 2)
    assert d.name == "xor"


def test_small_drift_warns_and_renormalizes():
    with pytest.warns(RenormalizationWarning):
        d = loads(doc([[0.25, 0.25], [0.25, 0.25 + 3e-10]]))
    assert d.pmf.mass.sum() == pytest.approx(1.0, abs=1e-15)


def test_large_drift_rejected():
    with pytest.raises(ValidationError, match="drift"):
        loads(doc([[0.25, 0.25], [0.25, 0.25 + 1e-8]]))


def test_exact_input_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        loads(doc([[0.5, 0.0], [0.0, 0.5]]))


@pytest.mark.parametrize("pmf, msg", [
    ([[0.5, 0.6], [-0.1, 0.0]], "negative"),
    ([[0.5, 0.5]], "shape"),
    ([[0.5, "x"], [0.0, 0.5]], "rectangular"),
])
def test_bad_pmf(pmf, msg):
    with pytest.raises(ValidationError, match=msg):
        loads(doc(pmf))


def test_fields():
    with pytest.raises(ValidationError, match="missing"):
        loads(json.dumps({"pmf": [1.0]}))
    with pytest.raises(ValidationError, match="unknown"):
        loads(doc([[0.25] * 2] * 2, colour="red"))


def test_function_needs_two_axes():
    text = json.dumps({"alphabets": {"X": ["0", "1"]}, "pmf": [0.5, 0.5], "function": [["a"]]})
    with pytest.raises(ValidationError, match="two axes"):
        loads(text)


def test_parse_error_location():
    with pytest.raises(ParseError) as ei:
        loads('{\n  "alphabets": {"X": ["0"]},\n  "pmf": [1.0,,]\n}')
    assert ei.value.line == 3 and ei.value.column > 1


@given(pmfs((2, 3)))
def test_round_trip_exact(m):
    d = loads(json.dumps({"alphabets": {"X": ["a", "b"], "Y": ["0", "1", "2"]}, "pmf": m.tolist()}))
    # serialization is exact; a reload may re-divide by a total that is off by an ulp
    assert json.loads(dumps(d))["pmf"] == d.pmf.mass.tolist()
    again = loads(dumps(d))
    np.testing.assert_allclose(again.pmf.mass, d.pmf.mass, rtol=4 * np.finfo(float).eps, atol=0)
    assert again.labels == d.labels


def test_file_round_trip(tmp_path):
    d = loads(doc([[0.4, 0.1], [0.1, 0.4]], function=[[0, 1], [1, 0]], notes="binary"))
    path = tmp_path / "law.json"
    write_distribution(d, path)
    back = parse_distribution(path)
    np.testing.assert_array_equal(back.pmf.mass, d.pmf.mass)
    np.testing.assert_array_equal(back.function.cells, d.function.cells)
    assert back.notes == "binary"
