"""Linear combinations of marginal entropies on raw tensors.

An :class:`Expr` is ``sum_k c_k H(S_k)`` for axis-name sets ``S_k``.  It can
be evaluated on a single tensor, on a batch of tensors, and differentiated
with respect to every cell of the tensor.  The tensor need not be
normalized: ``H(S)`` is always ``-sum m log2 m`` over the marginal ``m``,
which is what makes unconstrained finite differences meaningful.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

_INV_LN2 = 1.0 / np.log(2.0)
_TINY = 1e-300


class Expr:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[frozenset, float] | None = None):
        self.terms: dict[frozenset, float] = {}
        for k, v in (terms or {}).items():
            if k and v != 0.0:
                self.terms[frozenset(k)] = self.terms.get(frozenset(k), 0.0) + float(v)
        self.terms = {k: v for k, v in self.terms.items() if v != 0.0}

    def __add__(self, other: "Expr") -> "Expr":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0.0) + v
        return Expr(t)

    def __neg__(self) -> "Expr":
        return Expr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, c: float) -> "Expr":
        return Expr({k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def axes(self) -> frozenset:
        out = frozenset()
        for k in self.terms:
            out |= k
        return out

    def restricted_to(self, names: Iterable[str]) -> "Expr":
        """Drop terms that do not touch any of ``names`` (they are constants)."""
        names = set(names)
        return Expr({k: v for k, v in self.terms.items() if k & names})

    def __repr__(self):
        parts = [f"{v:+g}H({','.join(sorted(k))})" for k, v in sorted(self.terms.items(), key=lambda kv: sorted(kv[0]))]
        return "Expr(" + " ".join(parts) + ")"


def H(*axes: str | Sequence[str]) -> Expr:
    return Expr({_flat(axes): 1.0})


def I(a, b, c=()) -> Expr:  # noqa: E743
    a, b, c = _flat(a), _flat(b), _flat(c)
    return Expr({a | c: 1.0}) + Expr({b | c: 1.0}) - Expr({a | b | c: 1.0}) - Expr({c: 1.0})


def _flat(axes) -> frozenset:
    if isinstance(axes, str):
        return frozenset((axes,))
    out = set()
    for a in axes:
        out |= {a} if isinstance(a, str) else set(_flat(a))
    return frozenset(out)


def _sum_axes(names: Sequence[str], keep: frozenset, offset: int = 0) -> tuple[int, ...]:
    return tuple(i + offset for i, n in enumerate(names) if n not in keep)


def evaluate(expr: Expr, tensor: np.ndarray, names: Sequence[str]) -> float:
    total = 0.0
    for axes, coef in expr.terms.items():
        m = tensor.sum(axis=_sum_axes(names, axes), keepdims=False)
        m = m[m > 0]
        total += coef * float(-(m * np.log2(m)).sum())
    return total


def evaluate_batch(expr: Expr, tensors: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """Evaluate on ``tensors`` of shape ``(N, *shape)``."""
    n = tensors.shape[0]
    out = np.zeros(n)
    for axes, coef in expr.terms.items():
        m = tensors.sum(axis=_sum_axes(names, axes, offset=1)).reshape(n, -1)
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(m > 0, m * np.log2(np.where(m > 0, m, 1.0)), 0.0)
        out += coef * (-plogp.sum(axis=1))
    return out


def gradient(expr: Expr, tensor: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """d expr / d tensor[cell] for every cell; same shape as ``tensor``.

    ``dH(S)/dR(c) = -log2 m_S(c_S) - 1/ln 2``.  Marginal cells of zero mass
    are clamped to ``1e-300`` so the result stays finite.
    """
    g = np.zeros_like(tensor, dtype=float)
    for axes, coef in expr.terms.items():
        m = tensor.sum(axis=_sum_axes(names, axes), keepdims=True)
        g = g - coef * (np.log2(np.maximum(m, _TINY)) + _INV_LN2)
    return g


def value_and_gradient(expr: Expr, tensor: np.ndarray, names: Sequence[str]) -> tuple[float, np.ndarray]:
    total = 0.0
    g = np.zeros_like(tensor, dtype=float)
    for axes, coef in expr.terms.items():
        m = tensor.sum(axis=_sum_axes(names, axes), keepdims=True)
        logm = np.log2(np.maximum(m, _TINY))
        total += coef * float(-(np.where(m > 0, m * logm, 0.0)).sum())
        g -= coef * (logm + _INV_LN2)
    return total, g
