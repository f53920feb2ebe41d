"""JSON distribution files.

Schema: one object with ``"alphabets"`` (ordered axis name to symbol list),
``"pmf"`` (nested arrays, outermost axis first), and optionally
``"function"`` (nested arrays of Z symbols indexed by X then Y), ``"name"``
and ``"notes"``.  When ``"function"`` is present and the pmf is over two
axes, the third axis ``Z`` is attached deterministically.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, RenormalizationWarning, ValidationError
from .probkit import NORM_TOL, FunctionTable, JointPmf, apply_function

__all__ = ["Distribution", "parse_distribution", "loads", "dumps", "write_distribution"]


@dataclass
class Distribution:
    pmf: JointPmf
    labels: dict[str, tuple[str, ...]]
    function: FunctionTable | None = None
    name: str | None = None
    notes: str | None = None
    source_names: tuple[str, ...] = ()

    @property
    def joint(self) -> JointPmf:
        """The law with Z attached when a function table was given."""
        if self.function is None:
            return self.pmf
        x, y = self.source_names
        return apply_function(self.pmf, self.function, x, y, "Z")


def loads(text: str) -> Distribution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1, 1)
    missing = {"alphabets", "pmf"} - doc.keys()
    if missing:
        raise ValidationError(f"missing field(s): {sorted(missing)}")
    unknown = set(doc) - {"alphabets", "pmf", "function", "name", "notes"}
    if unknown:
        raise ValidationError(f"unknown field(s): {sorted(unknown)}")
    alph = doc["alphabets"]
    if not isinstance(alph, dict) or not alph:
        raise ValidationError("'alphabets' must be a non-empty object")
    labels = {}
    for k, v in alph.items():
        if not isinstance(v, list) or not v:
            raise ValidationError(f"alphabet {k!r} must be a non-empty list of symbols")
        syms = tuple(str(s) for s in v)
        if len(set(syms)) != len(syms):
            raise ValidationError(f"alphabet {k!r} repeats a symbol")
        labels[k] = syms
    names = tuple(labels)
    shape = tuple(len(labels[n]) for n in names)
    try:
        mass = np.array(doc["pmf"], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("'pmf' must be a rectangular nested array of numbers") from None
    if mass.shape != shape:
        raise ValidationError(f"pmf shape {mass.shape} does not match alphabets {shape}")
    if not np.all(np.isfinite(mass)):
        raise ValidationError("pmf has non-finite entries")
    if mass.min() < 0:
        raise ValidationError(f"pmf has a negative entry ({mass.min():g})")
    drift = abs(float(mass.sum()) - 1.0)
    if drift > NORM_TOL:
        raise ValidationError(f"pmf sums to {mass.sum():.12g}; drift {drift:.3g} exceeds {NORM_TOL:g}")
    if drift > 0 and drift > 64 * np.finfo(float).eps * mass.size:
        warnings.warn(f"pmf renormalized (drift {drift:.3g})", RenormalizationWarning, stacklevel=2)
    pmf = JointPmf(names, mass)

    fn = None
    if "function" in doc:
        if len(names) != 2:
            raise ValidationError("'function' requires a pmf over exactly two axes")
        rows = doc["function"]
        try:
            fn = FunctionTable.from_symbols(rows)
        except Exception as e:  # noqa: BLE001 - surfaced as a schema error
            raise ValidationError(f"bad function table: {e}") from None
        if fn.cells.shape != shape:
            raise ValidationError(f"function table shape {fn.cells.shape} does not match {shape}")
    for key in ("name", "notes"):
        if key in doc and not isinstance(doc[key], str):
            raise ValidationError(f"{key!r} must be a string")
    return Distribution(pmf, labels, fn, doc.get("name"), doc.get("notes"), names)


def parse_distribution(path) -> Distribution:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(dist: Distribution) -> str:
    doc = {
        "alphabets": {n: list(dist.labels.get(n, [str(i) for i in range(s)]))
                      for n, s in zip(dist.pmf.names, dist.pmf.shape)},
        "pmf": dist.pmf.mass.tolist(),  # repr floats: 17 significant digits round-trip
    }
    if dist.function is not None:
        syms = dist.function.symbols or tuple(range(dist.function.nz))
        doc["function"] = [[_plain(syms[v]) for v in row] for row in dist.function.cells]
    if dist.name is not None:
        doc["name"] = dist.name
    if dist.notes is not None:
        doc["notes"] = dist.notes
    return json.dumps(doc, indent=2)


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def write_distribution(dist: Distribution, path) -> None:
    Path(path).write_text(dumps(dist) + "\n", encoding="utf-8")
