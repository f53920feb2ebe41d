"""Suites of criteria written out as CSV with a markdown mirror."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .criteria import CriterionResult, run_criterion
from .results import CERTIFICATE_KINDS

__all__ = ["SUITES", "ReportRow", "run_report", "write_table"]

SUITES = {
    "theorem2": (1, 2, 3),
    "theorem3": (4,),
    "theorem4": (5,),
    "identity": (6,),
    "tensorize": (7,),
    "thm5": (8,),
    "delta": (9, 13),
    "rectangle": (10,),
    "erasure": (11,),
    "ribbon": (12,),
    "hygiene": (14,),
    "all": tuple(range(1, 15)),
}


@dataclass
class ReportRow:
    criterion: int
    instance: str
    quantity: str
    value: float
    method: str
    residual: float
    reference: float
    runtime: float  # wall time of the whole criterion, in seconds

    def __post_init__(self):
        self.value = float(self.value)
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite value in row {self.instance!r}")
        if self.method not in CERTIFICATE_KINDS:
            raise ValueError(f"method {self.method!r} is not a certificate kind")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9f}"
    return str(v)


def write_table(rows: list[dict], fields: list[str], csv_path: Path, md_path: Path) -> None:
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[f]) for f in fields])
    lines = ["| " + " | ".join(fields) + " |", "|" + "---|" * len(fields)]
    lines += ["| " + " | ".join(_fmt(r[f]) for f in fields) + " |" for r in rows]
    md_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _rows(res: CriterionResult) -> list[ReportRow]:
    return [ReportRow(res.number, str(r["instance"]), r["quantity"], r["value"], r["method"],
                      float(r["residual"]), float(r["reference"]), res.runtime) for r in res.rows]


def run_report(suite: str, out: str | Path, seed: int = 0, log=print) -> tuple[int, list[CriterionResult]]:
    """Run a suite and write ``<suite>_rows`` and ``<suite>_summary`` as .csv and .md.

    Returns ``(exit status, results)``: 0 when every criterion passes, else 1.
    Raises ``KeyError`` for an unknown suite.
    """
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for n in SUITES[suite]:
        res = run_criterion(n, seed=seed)
        results.append(res)
        if log:
            log(res.line())
    rows = [asdict(r) for res in results for r in _rows(res)]
    fields = list(ReportRow.__dataclass_fields__)
    write_table(rows, fields, out / f"{suite}_rows.csv", out / f"{suite}_rows.md")
    summary = [{"criterion": r.number, "name": r.name, "passed": r.passed, "measured": float(r.measured),
                "threshold": float(r.threshold), "runtime": r.runtime, "detail": r.detail} for r in results]
    write_table(summary, list(summary[0]), out / f"{suite}_summary.csv", out / f"{suite}_summary.md")
    failing = [r for r in results if not r.passed]
    if failing and log:
        log("failing criteria: " + ", ".join(f"C{r.number}" for r in failing))
    return (1 if failing else 0), results
