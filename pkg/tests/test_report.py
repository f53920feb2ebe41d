import csv

import pytest

from skbounds.report import SUITES, ReportRow, run_report


def test_unknown_suite(tmp_path):
    with pytest.raises(KeyError):
        run_report("nope", tmp_path)


def test_suites_cover_all_criteria():
    assert sorted({n for k, v in SUITES.items() if k != "all" for n in v}) == list(range(1, 15))


def test_row_validation():
    with pytest.raises(ValueError):
        ReportRow(1, "a", "q", float("nan"), "exact", 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        ReportRow(1, "a", "q", 1.0, "guess", 0.0, 0.0, 0.0)


def test_suite_writes_rows_and_summary(tmp_path):
    lines = []
    status, results = run_report("theorem3", tmp_path, seed=0, log=lines.append)
    assert status == 0 and results[0].passed
    assert lines[0].startswith("[PASS] C4")
    for stem in ("theorem3_rows", "theorem3_summary"):
        assert (tmp_path / f"{stem}.csv").exists() and (tmp_path / f"{stem}.md").exists()
    with open(tmp_path / "theorem3_rows.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(r["criterion"] == "4" for r in rows)
    assert all(len(r["value"].split(".")[-1]) == 9 for r in rows if "." in r["value"])
