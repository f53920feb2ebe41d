"""Dense two-phase revised simplex for ``min c.w  s.t.  A w = b, w >= 0``.

Built for the envelope problems: a handful of rows and up to millions of
columns.  The basis matrix is small, so every iteration re-solves with it
from scratch instead of maintaining an updated inverse.  Pricing is Dantzig
(most negative reduced cost); after a run of degenerate pivots it switches
to Bland's rule, which cannot cycle, and switches back once the objective
moves again.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleError, ShapeError, UnboundedError

__all__ = ["LinearProgram", "LPResult", "lp_minimize"]


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,):
            raise ShapeError(f"inconsistent LP dimensions: c {self.c.shape}, A {self.A.shape}, b {self.b.shape}")


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    basis: np.ndarray
    dual: np.ndarray
    rows: np.ndarray  # indices of constraint rows kept after redundancy removal
    iterations: int
    bland_pivots: int = 0
    history: list = field(default_factory=list)

    @property
    def support(self) -> np.ndarray:
        return self.basis[self.x[self.basis] > 0]


def _solve(B, rhs):
    return np.linalg.solve(B, rhs)


def _simplex(A, b, c, basis, *, tol, pivot_tol, max_iter, degenerate_switch):
    """Phase loop from a feasible ``basis``; returns (basis, iterations, bland pivots)."""
    m, n = A.shape
    it = 0
    bland = False
    stall = 0
    bland_count = 0
    last_obj = np.inf
    while True:
        B = A[:, basis]
        xb = _solve(B, b)
        y = _solve(B.T, c[basis])
        d = c - y @ A
        d[basis] = 0.0
        obj = float(c[basis] @ xb)
        if bland:
            neg = np.flatnonzero(d < -tol)
            if neg.size == 0:
                return basis, it, bland_count
            e = int(neg[0])
        else:
            e = int(np.argmin(d))
            if d[e] >= -tol:
                return basis, it, bland_count
        u = _solve(B, A[:, e])
        pos = u > pivot_tol
        if not pos.any():
            raise UnboundedError(f"LP unbounded along column {e}")
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xb[pos], 0.0) / u[pos]
        theta = ratios.min()
        ties = np.flatnonzero(ratios <= theta + 1e-14 * max(1.0, theta))
        # Bland leaving rule: smallest variable index among ties
        leave = ties[np.argmin(basis[ties])]
        basis = basis.copy()
        basis[leave] = e
        it += 1
        if bland:
            bland_count += 1
        if obj < last_obj - 1e-13 * max(1.0, abs(obj)):
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= degenerate_switch:
                bland = True
        last_obj = min(last_obj, obj)
        if it >= max_iter:
            raise RuntimeError(f"simplex did not converge in {max_iter} iterations")


def lp_minimize(
    lp: LinearProgram,
    *,
    tol: float = 1e-11,
    pivot_tol: float = 1e-12,
    feas_tol: float = 1e-9,
    max_iter: int = 50_000,
    degenerate_switch: int = 10,
    initial_basis: np.ndarray | None = None,
) -> LPResult:
    """Solve ``min c.w`` over ``{A w = b, w >= 0}``.

    Raises :class:`InfeasibleError` (with the phase-1 dual as certificate) or
    :class:`UnboundedError`.  ``initial_basis``, when given and primal
    feasible, skips phase 1.
    """
    A, b, c = lp.A.copy(), lp.b.copy(), lp.c
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    rows = np.arange(m)
    total_it = 0
    total_bland = 0

    basis = None
    if initial_basis is not None:
        cand = np.asarray(initial_basis, dtype=int)
        B = A[:, cand]
        if cand.size == m and np.linalg.matrix_rank(B) == m:
            xb = _solve(B, b)
            if xb.min() >= -feas_tol:
                basis = cand

    if basis is None:
        # phase 1 with one artificial per row
        A1 = np.hstack([A, np.eye(m)])
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis1 = np.arange(n, n + m)
        basis1, it, bl = _simplex(A1, b, c1, basis1, tol=tol, pivot_tol=pivot_tol,
                                  max_iter=max_iter, degenerate_switch=degenerate_switch)
        total_it += it
        total_bland += bl
        B = A1[:, basis1]
        xb = _solve(B, b)
        infeas = float(c1[basis1] @ xb)
        if infeas > feas_tol:
            y = _solve(B.T, c1[basis1])
            cert = np.where(flip, -y, y)
            raise InfeasibleError(f"LP infeasible (phase-1 residual {infeas:.3g})", certificate=cert)
        # drive zero-level artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for pos in range(m):
            if basis1[pos] < n:
                continue
            B = A1[:, basis1]
            row = _solve(B.T, np.eye(m)[pos])  # row `pos` of B^{-1}
            alpha = row @ A
            alpha[basis1[basis1 < n]] = 0.0
            cand = np.flatnonzero(np.abs(alpha) > 1e-9)
            if cand.size:
                basis1[pos] = cand[np.argmax(np.abs(alpha[cand]))]
            else:
                keep[pos] = False  # redundant constraint
        if not keep.all():
            # drop redundant rows: find which original rows they correspond to
            B = A1[:, basis1]
            art_rows = [basis1[pos] - n for pos in range(m) if not keep[pos]]
            drop = np.zeros(m, dtype=bool)
            drop[art_rows] = True
            rows = rows[~drop]
            A = A[~drop]
            b = b[~drop]
            basis1 = basis1[keep]
            flip = flip[~drop]
            m = A.shape[0]
        basis = basis1

    basis, it, bl = _simplex(A, b, c, basis, tol=tol, pivot_tol=pivot_tol,
                             max_iter=max_iter, degenerate_switch=degenerate_switch)
    total_it += it
    total_bland += bl
    B = A[:, basis]
    xb = _solve(B, b)
    xb[xb < 0] = 0.0
    x = np.zeros(n)
    x[basis] = xb
    y = _solve(B.T, c[basis])
    y = np.where(flip, -y, y)
    return LPResult(x=x, value=float(c @ x), basis=basis, dual=y, rows=rows,
                    iterations=total_it, bland_pivots=total_bland)
