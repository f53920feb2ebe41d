"""Mirror-descent over products of conditional laws.

A :class:`KernelModel` is a fixed base tensor times a list of kernels, each
a conditional law of some new axes given existing ones.  The joint tensor is
their broadcast product.  Objectives map the joint tensor to a value and a
gradient with respect to every joint cell; the chain rule through the
product gives the gradient with respect to each kernel entry.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..expr import Expr, value_and_gradient
from .config import SearchConfig

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class KernelSpec:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    out_sizes: tuple[int, ...]


class KernelModel:
    def __init__(self, base: np.ndarray, base_names: Sequence[str], kernels: Sequence[KernelSpec]):
        self.base = np.asarray(base, dtype=float)
        names = list(base_names)
        sizes = list(self.base.shape)
        for k in kernels:
            for n in k.inputs:
                if n not in names:
                    raise ValueError(f"kernel input {n!r} is not yet defined")
            for n, s in zip(k.outputs, k.out_sizes):
                if n in names:
                    raise ValueError(f"axis {n!r} defined twice")
                names.append(n)
                sizes.append(int(s))
        self.names = tuple(names)
        self.shape = tuple(sizes)
        self.kernels = tuple(kernels)
        nd = len(self.shape)
        self._base_view = self.base.reshape(self.base.shape + (1,) * (nd - self.base.ndim))
        self._layout = []
        for k in self.kernels:
            pos = [self.names.index(n) for n in k.inputs + k.outputs]
            perm = np.argsort(pos)
            view = [1] * nd
            for p in pos:
                view[p] = self.shape[p]
            other = tuple(i for i in range(nd) if i not in pos)
            in_pos = [self.names.index(n) for n in k.inputs]
            in_other = tuple(i for i in range(nd) if i not in in_pos)
            self._layout.append((perm, tuple(view), other, np.argsort(perm), in_other))

    def kernel_shape(self, i: int) -> tuple[int, ...]:
        k = self.kernels[i]
        return tuple(self.shape[self.names.index(n)] for n in k.inputs) + tuple(k.out_sizes)

    def _view(self, i: int, K: np.ndarray) -> np.ndarray:
        perm, view, *_ = self._layout[i]
        return np.transpose(K, perm).reshape(view)

    def joint(self, ks: Sequence[np.ndarray]) -> np.ndarray:
        t = self._base_view
        for i, K in enumerate(ks):
            t = t * self._view(i, K)
        return t

    def value_and_grad(self, objective: Objective, ks: Sequence[np.ndarray]):
        views = [self._view(i, K) for i, K in enumerate(ks)]
        t = self._base_view
        for v in views:
            t = t * v
        val, L = objective(t)
        grads = []
        for i in range(len(ks)):
            rest = self._base_view
            for j, v in enumerate(views):
                if j != i:
                    rest = rest * v
            _, _, other, inv, _ = self._layout[i]
            g = (L * rest).sum(axis=other)
            grads.append(np.transpose(g, inv))
        return val, grads, t

    def input_mass(self, i: int, joint: np.ndarray) -> np.ndarray:
        """Marginal of ``joint`` on kernel ``i``'s inputs, in kernel layout."""
        k = self.kernels[i]
        *_, in_other = self._layout[i]
        m = joint.sum(axis=in_other)
        in_pos = [self.names.index(n) for n in k.inputs]
        return np.transpose(m, np.argsort(np.argsort(in_pos))) if len(in_pos) > 1 else m

    def random_kernels(self, rng: np.random.Generator) -> list[np.ndarray]:
        out = []
        for i, k in enumerate(self.kernels):
            shape = self.kernel_shape(i)
            n_in = int(np.prod(shape[:len(k.inputs)]))
            rows = rng.dirichlet(np.ones(int(np.prod(k.out_sizes))), size=n_in)
            out.append(rows.reshape(shape))
        return out


class ExprObjective:
    """``sign * expr`` evaluated on the joint tensor."""

    def __init__(self, expr: Expr, names: Sequence[str], sign: float = 1.0):
        self.expr = expr
        self.names = tuple(names)
        self.sign = sign

    def __call__(self, t: np.ndarray):
        v, g = value_and_gradient(self.expr, t, self.names)
        return self.sign * v, self.sign * g


class PenaltyObjective:
    """``-gain + mu * max(0, c)**2`` for a maximisation of ``gain`` subject to ``c <= 0``."""

    def __init__(self, gain: Expr, constraint: Expr, offset: float, names: Sequence[str], mu: float):
        self.gain = gain
        self.constraint = constraint
        self.offset = offset
        self.names = tuple(names)
        self.mu = mu

    def __call__(self, t: np.ndarray):
        v, g = value_and_gradient(self.gain, t, self.names)
        c, gc = value_and_gradient(self.constraint, t, self.names)
        c += self.offset
        if c > 0:
            return -v + self.mu * c * c, -g + 2.0 * self.mu * c * gc
        return -v, -g


def _row_view(K: np.ndarray, n_in_axes: int) -> np.ndarray:
    n_in = int(np.prod(K.shape[:n_in_axes]))
    return K.reshape(n_in, -1)


def eg_step(model: KernelModel, ks, grads, joint, eta: float) -> list[np.ndarray]:
    new = []
    for i, (K, G) in enumerate(zip(ks, grads)):
        n_in = len(model.kernels[i].inputs)
        m = model.input_mass(i, joint).reshape(-1, 1)
        rows = _row_view(K, n_in)
        g = _row_view(G, n_in) / np.maximum(m, 1e-12)
        g = g - g.min(axis=1, keepdims=True)
        r = rows * np.exp(-eta * np.minimum(g, 700.0 / max(eta, 1e-300)))
        r /= r.sum(axis=1, keepdims=True)
        new.append(r.reshape(K.shape))
    return new


def smooth(ks: Sequence[np.ndarray], model: KernelModel, eps: float) -> list[np.ndarray]:
    out = []
    for i, K in enumerate(ks):
        rows = _row_view(K, len(model.kernels[i].inputs))
        r = (1 - eps) * rows + eps / rows.shape[1]
        out.append(r.reshape(K.shape))
    return out


def minimize(model: KernelModel, objective: Objective, ks0: Sequence[np.ndarray], cfg: SearchConfig):
    """Exponentiated-gradient descent with an adaptive step; returns (value, kernels, iterations)."""
    ks = [np.array(K, dtype=float) for K in ks0]
    val, grads, joint = model.value_and_grad(objective, ks)
    eta = cfg.step
    stall = 0
    it = 0
    for it in range(1, cfg.max_iter + 1):
        cand = eg_step(model, ks, grads, joint, eta)
        cval, cgrads, cjoint = model.value_and_grad(objective, cand)
        if cval <= val:
            stall = stall + 1 if val - cval < cfg.tol else 0
            ks, val, grads, joint = cand, cval, cgrads, cjoint
            eta = min(eta * cfg.step_up, 1e4)
            if stall >= cfg.patience:
                break
        else:
            eta *= cfg.step_down
            if eta < 1e-12:
                break
    return float(val), ks, it
