"""Lower convex envelopes of functions sampled on simplex atoms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import InfeasibleError
from ..expr import Expr
from .grid import SimplexGrid
from .lp import LinearProgram, lp_minimize

_INV_LN2 = 1.0 / np.log(2.0)
_CHUNK = 200_000


@dataclass
class EnvelopeResult:
    value: float
    atoms: np.ndarray
    weights: np.ndarray
    k: int
    dual: np.ndarray = field(repr=False, default=None)
    iterations: int = 0

    @property
    def support_size(self) -> int:
        return len(self.weights)

    def barycenter(self) -> np.ndarray:
        return self.weights @ self.atoms


class CellFunctional:
    """An entropy combination viewed as a function of the mass on selected cells.

    ``cells`` are flat C-order indices into a tensor of ``shape`` whose axes
    are ``names``; a point ``q`` of the reduced simplex puts mass ``q[i]`` on
    ``cells[i]`` and zero elsewhere.  Each ``H(S)`` marginal is an aggregation
    ``q @ M_S`` with a 0/1 matrix, so batches of atoms are cheap to evaluate.
    """

    def __init__(self, expr: Expr, names: Sequence[str], shape: Sequence[int], cells: np.ndarray):
        self.expr = expr
        self.names = tuple(names)
        self.shape = tuple(shape)
        self.cells = np.asarray(cells, dtype=int)
        multi = np.unravel_index(self.cells, self.shape)
        self._terms = []
        for axes, coef in expr.terms.items():
            keep = [i for i, n in enumerate(self.names) if n in axes]
            if keep:
                key = np.ravel_multi_index(tuple(multi[i] for i in keep), tuple(self.shape[i] for i in keep))
            else:
                key = np.zeros(len(self.cells), dtype=int)
            _, labels = np.unique(key, return_inverse=True)
            m = np.zeros((len(self.cells), labels.max() + 1))
            m[np.arange(len(self.cells)), labels] = 1.0
            self._terms.append((coef, m))

    @property
    def d(self) -> int:
        return len(self.cells)

    def __call__(self, atoms: np.ndarray) -> np.ndarray:
        atoms = np.atleast_2d(atoms)
        out = np.empty(len(atoms))
        for lo in range(0, len(atoms), _CHUNK):
            block = atoms[lo:lo + _CHUNK]
            acc = np.zeros(len(block))
            for coef, m in self._terms:
                marg = block @ m
                with np.errstate(divide="ignore", invalid="ignore"):
                    plogp = np.where(marg > 0, marg * np.log2(np.where(marg > 0, marg, 1.0)), 0.0)
                acc -= coef * plogp.sum(axis=1)
            out[lo:lo + _CHUNK] = acc
        return out

    def gradient(self, q: np.ndarray) -> np.ndarray:
        g = np.zeros(self.d)
        for coef, m in self._terms:
            marg = q @ m
            g -= coef * (m @ (np.log2(np.maximum(marg, 1e-300)) + _INV_LN2))
        return g

    def embed(self, q: np.ndarray) -> np.ndarray:
        """Full tensor with ``q`` placed on the selected cells."""
        t = np.zeros(int(np.prod(self.shape)))
        t[self.cells] = q
        return t.reshape(self.shape)


def lower_convex_envelope(
    phi: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    target: np.ndarray,
    grid: SimplexGrid,
    *,
    extra_atoms: np.ndarray | None = None,
) -> EnvelopeResult:
    """Minimise ``sum_a w_a phi(a)`` over convex weights with barycenter ``target``.

    ``phi`` is either a vectorised callable on ``(N, d)`` atom arrays or an
    array of precomputed values on the grid atoms (then ``extra_atoms``
    must be absent).  The optimal basis has at most ``d`` atoms.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (grid.d,):
        raise ValueError(f"target has shape {target.shape}, grid dimension is {grid.d}")
    if target.min() < -1e-12 or abs(target.sum() - 1.0) > 1e-9:
        raise ValueError("target is not a probability vector")
    atoms = grid.atoms
    if extra_atoms is not None and len(extra_atoms):
        atoms = np.vstack([atoms, np.asarray(extra_atoms, dtype=float)])
    values = phi(atoms) if callable(phi) else np.asarray(phi, dtype=float)
    if values.shape != (len(atoms),):
        raise ValueError("phi values do not match the atom count")
    if not np.all(np.isfinite(values)):
        raise ValueError("phi must be finite on every atom")

    start = grid.vertex_indices()
    try:
        res = lp_minimize(LinearProgram(values, atoms.T, target), initial_basis=start)
    except InfeasibleError as exc:  # pragma: no cover - vertices are always a feasible basis
        raise AssertionError("target outside the grid hull") from exc
    used = res.x > 0
    w = res.x[used]
    sel = atoms[used]
    order = np.lexsort(sel.T[::-1])
    return EnvelopeResult(
        value=float(values[used] @ w), atoms=sel[order], weights=w[order], k=grid.k,
        dual=res.dual, iterations=res.iterations,
    )


def dual_gap(
    functional: CellFunctional,
    dual: np.ndarray,
    atoms: np.ndarray,
    values: np.ndarray,
    *,
    starts: int = 8,
    steps: int = 300,
) -> float:
    """Estimate ``max_q (dual . q - phi(q))`` over the whole simplex.

    At optimality the LP dual satisfies ``dual . a <= phi(a)`` on every atom,
    so the envelope of ``phi`` at the target is at least the LP value minus
    this gap.  The maximum is approached by exponentiated-gradient ascent
    from the atoms where the dual is tightest.
    """
    scores = atoms @ dual - values
    top = np.argsort(-scores, kind="stable")[:starts]
    best = float(max(scores.max(), 0.0))
    for i in top:
        q = np.clip(atoms[i], 1e-9, None)
        q /= q.sum()
        eta = 0.5
        cur = float(dual @ q - functional(q)[0])
        for _ in range(steps):
            g = dual - functional.gradient(q)
            cand = q * np.exp(eta * (g - g.max()))
            cand /= cand.sum()
            val = float(dual @ cand - functional(cand)[0])
            if val >= cur:
                q, cur = cand, val
                eta = min(eta * 1.2, 1e3)
            else:
                eta *= 0.5
                if eta < 1e-10:
                    break
        best = max(best, cur)
    return best
