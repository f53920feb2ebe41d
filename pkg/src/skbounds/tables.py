"""Which functions ``Z = f(X, Y)`` keep the one-shot bound at ``I(X;Y)`` for every law.

Only constants and, on a 2 x 2 alphabet, the XOR pattern do.  The
classifier scans 2 x 2 subtables: one that is neither constant nor XOR is
a witness of invalidity, and a law supported on it shows the gap.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, PreconditionError
from .probkit import FunctionTable, JointPmf, apply_function, mutual_information

__all__ = [
    "Classification",
    "Falsification",
    "classify_table",
    "enumerate_tables",
    "falsify_invalid",
    "FALSIFY_LAWS",
]

ENUM_CAP = 10**7
GAP_THRESHOLD = 1e-3
FALSIFY_LAWS = (
    np.array([[0.4, 0.1], [0.1, 0.4]]),
    np.array([[0.1, 0.4], [0.4, 0.1]]),
    np.array([[0.35, 0.15], [0.05, 0.45]]),
)


@dataclass(frozen=True)
class Classification:
    kind: str  # "ValidConstant", "ValidXor" or "Invalid"
    rows: tuple[int, int] | None = None
    cols: tuple[int, int] | None = None

    @property
    def valid(self) -> bool:
        return self.kind != "Invalid"


def _sub_ok(a, b, c, d) -> bool:
    if a == b == c == d:
        return True
    return a == d and b == c and a != b


def _check_sizes(nx: int, ny: int):
    if nx < 2 or ny < 2:
        raise PreconditionError(
            f"tables need at least two rows and two columns (got {nx} x {ny}); "
            "with a singleton axis I(X;Y) = 0 and every table is trivially valid")


def classify_table(t: FunctionTable) -> Classification:
    """Constant, 2 x 2 XOR, or Invalid with the first bad subtable in (row pair, column pair) order."""
    cells = t.cells
    nx, ny = cells.shape
    _check_sizes(nx, ny)
    c = cells.tolist()
    for r1, r2 in combinations(range(nx), 2):
        for c1, c2 in combinations(range(ny), 2):
            if not _sub_ok(c[r1][c1], c[r1][c2], c[r2][c1], c[r2][c2]):
                return Classification("Invalid", (r1, r2), (c1, c2))
    first = c[0][0]
    if all(v == first for row in c for v in row):
        return Classification("ValidConstant")
    if (nx, ny) == (2, 2):
        return Classification("ValidXor")
    raise AssertionError(f"table {c} passed every subtable test without being constant")


def _all_tables(nx: int, ny: int, nz: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    digits = np.empty((hi - lo, nx * ny), dtype=np.int8)
    for j in range(nx * ny - 1, -1, -1):
        digits[:, j] = idx % nz
        idx //= nz
    return digits.reshape(-1, nx, ny)


def enumerate_tables(nx: int, ny: int, nz: int, *, listing: bool = False, cap: int = ENUM_CAP,
                     chunk: int = 1 << 20) -> dict:
    """Classify all ``nz ** (nx * ny)`` tables; tables are indexed in base-``nz`` row-major order."""
    _check_sizes(nx, ny)
    if nz < 1:
        raise ValueError("nz must be >= 1")
    total = nz ** (nx * ny)
    if total > cap:
        raise CapacityError(f"{total} tables exceed the enumeration cap {cap}")
    pairs = [(r, c) for r in combinations(range(nx), 2) for c in combinations(range(ny), 2)]
    counts = {"tables": total, "valid": 0, "invalid": 0, "constant": 0, "xor": 0}
    valid_idx = []
    for lo in range(0, total, chunk):
        hi = min(total, lo + chunk)
        T = _all_tables(nx, ny, nz, lo, hi)
        ok = np.ones(hi - lo, dtype=bool)
        for (r1, r2), (c1, c2) in pairs:
            a, b, c, d = T[:, r1, c1], T[:, r1, c2], T[:, r2, c1], T[:, r2, c2]
            const = (a == b) & (b == c) & (c == d)
            xor = (a == d) & (b == c) & (a != b)
            ok &= const | xor
        flat = T.reshape(len(T), -1)
        constant = (flat == flat[:, :1]).all(axis=1)
        xor_tab = ok & ~constant
        if (nx, ny) != (2, 2) and xor_tab.any():
            raise AssertionError("non-constant table passed the subtable scan")
        counts["valid"] += int(ok.sum())
        counts["invalid"] += int((~ok).sum())
        counts["constant"] += int(constant.sum())
        counts["xor"] += int(xor_tab.sum())
        if listing:
            valid_idx.append(np.flatnonzero(ok) + lo)
    if listing:
        counts["valid_indices"] = np.concatenate(valid_idx) if valid_idx else np.zeros(0, dtype=np.int64)
    return counts


def table_from_index(index: int, nx: int, ny: int, nz: int) -> FunctionTable:
    cells = _all_tables(nx, ny, nz, index, index + 1)[0].astype(int)
    return FunctionTable(cells, tuple(range(nz)))


@dataclass
class Falsification:
    succeeded: bool
    law: JointPmf | None
    gap: float
    mutual_information: float
    psi_hat: float
    rows: tuple[int, int]
    cols: tuple[int, int]
    message: str = ""


def falsify_invalid(t: FunctionTable, *, k: int | None = None, threshold: float = GAP_THRESHOLD) -> Falsification:
    """A law on the witness subtable for which the envelope value sits at least ``threshold`` below ``I(X;Y)``.

    The fixed laws in ``FALSIFY_LAWS`` are tried in order.  The envelope
    value is an upper estimate of the bound, so the reported gap is a lower
    estimate of the true one.
    """
    from .envelope.psi import psi_hat_envelope

    verdict = classify_table(t)
    if verdict.valid:
        raise PreconditionError(f"table is {verdict.kind}; nothing to falsify")
    (r1, r2), (c1, c2) = verdict.rows, verdict.cols
    best = None
    for base in FALSIFY_LAWS:
        m = np.zeros(t.cells.shape)
        m[np.ix_([r1, r2], [c1, c2])] = base
        law = JointPmf(("X", "Y"), m)
        full = apply_function(law, t)
        rep = psi_hat_envelope(full, k) if k else psi_hat_envelope(full)
        mi = mutual_information(law, "X", "Y")
        gap = mi - rep.value
        cand = Falsification(gap >= threshold, law, gap, mi, rep.value, verdict.rows, verdict.cols)
        if best is None or gap > best.gap:
            best = cand
        if cand.succeeded:
            return cand
    best.message = (f"open case: best gap {best.gap:.3g} below {threshold:g} on rows {verdict.rows}, "
                    f"columns {verdict.cols}")
    return best
