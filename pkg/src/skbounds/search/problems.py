"""Kernel searches for the bounds that have no closed form.

Every routine seeds the structured choices first (constant auxiliaries,
copies of observed variables, known constructions), records their exact
values, then runs exponentiated-gradient descent from smoothed copies of
the seeds and from Dirichlet(1) restarts.  The smallest value wins; ties go
to the earliest restart index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InfeasibleError, PreconditionError, ShapeError
from ..expr import Expr, H, I, evaluate
from ..probkit import JointPmf, entropy, is_deterministic, roles
from ..results import BoundReport
from .config import SearchConfig
from .engine import ExprObjective, KernelModel, KernelSpec, PenaltyObjective, minimize, smooth

__all__ = [
    "psi_hat_search",
    "intrinsic_information",
    "sow_evaluate",
    "ribbon_margin",
    "interactive_lower_bound",
    "psi_delta_evaluate",
    "psi_delta_sweep",
    "kernel_from_witness",
]


def _prod(p: JointPmf, axes) -> int:
    return int(np.prod([p.size(a) for a in axes])) if axes else 1


def _flat_index(p: JointPmf, axes, grids) -> np.ndarray:
    """Flat index of the ``axes`` part of every cell of ``p``'s shape."""
    if not axes:
        return np.zeros(p.shape, dtype=int)
    idx = [grids[p.axis(a)] for a in axes]
    return np.ravel_multi_index(idx, [p.size(a) for a in axes])


def _det_kernel(in_shape, out_size, labels) -> np.ndarray:
    """Deterministic kernel sending input cell ``c`` to output ``labels[c]``."""
    K = np.zeros(tuple(in_shape) + (out_size,))
    idx = np.indices(in_shape)
    K[tuple(idx) + (labels,)] = 1.0
    return K


@dataclass
class _Run:
    value: float
    kernels: list
    index: int
    label: str


def _search(model: KernelModel, objective, seeds: Sequence[tuple[str, list]], cfg: SearchConfig,
            *, optimize_seeds: bool = True):
    """Evaluate ``seeds`` exactly, descend from each and from random restarts."""
    runs: list[_Run] = []
    trace = []
    for label, ks in seeds:
        exact, _, _ = model.value_and_grad(objective, ks)
        best = _Run(float(exact), [np.array(K) for K in ks], len(runs), label)
        if optimize_seeds:
            v, opt, _ = minimize(model, objective, smooth(ks, model, cfg.smoothing), cfg)
            if v < best.value:
                best = _Run(v, opt, best.index, label)
        runs.append(best)
        trace.append({"restart": best.index, "seed": label, "exact": float(exact), "best": best.value})
    for rng in cfg.rngs():
        ks = model.random_kernels(rng)
        v, opt, _ = minimize(model, objective, ks, cfg)
        runs.append(_Run(v, opt, len(runs), "dirichlet"))
        trace.append({"restart": len(runs) - 1, "seed": "dirichlet", "best": v})
    winner = min(runs, key=lambda r: (r.value, r.index))
    return winner, trace


# --- one-shot upper bound ----------------------------------------------------

def psi_hat_model(p: JointPmf, j_card: int):
    x, y, z = roles(p)
    if not z:
        raise PreconditionError("law needs a Z axis")
    model = KernelModel(p.mass, p.names, [KernelSpec(p.names, ("J",), (j_card,))])
    expr = I(x, y, "J") + I(x + y, "J", z)
    return model, ExprObjective(expr, model.names)


def kernel_from_witness(p: JointPmf, weights, components, j_card: int) -> np.ndarray:
    """``K(j|c) = w_j Q_j(c) / P(c)`` on the support of ``P``; uniform elsewhere."""
    if len(weights) > j_card:
        raise ShapeError(f"witness has {len(weights)} components but |J| = {j_card}")
    K = np.zeros(p.shape + (j_card,))
    for j, (w, q) in enumerate(zip(weights, components)):
        K[..., j] = w * q.transpose(p.names).mass
    tot = K.sum(axis=-1, keepdims=True)
    return np.where(tot > 0, K / np.where(tot > 0, tot, 1.0), 1.0 / j_card)


def _structured_witnesses(p: JointPmf):
    from ..constructions import structured_splits

    try:
        return structured_splits(p)
    except (PreconditionError, ShapeError):
        return []


def psi_hat_search(p: JointPmf, cfg: SearchConfig = SearchConfig(), *, witnesses=None) -> BoundReport:
    """Best found ``I(X;Y|J) + I(X,Y;J|Z)`` over kernels ``P_{J|X,Y,Z}``."""
    x, y, z = roles(p)
    j = cfg.j_card or _prod(p, x) * _prod(p, y)
    model, obj = psi_hat_model(p, j)
    grids = np.indices(p.shape)
    seeds = [("constant", [_det_kernel(p.shape, j, np.zeros(p.shape, dtype=int))])]
    nz = _prod(p, z)
    if j >= nz and nz > 1:
        seeds.append(("J=Z", [_det_kernel(p.shape, j, _flat_index(p, z, grids))]))
    if witnesses is None:
        witnesses = _structured_witnesses(p)
    witnesses = [w if isinstance(w, tuple) else (f"witness {i}", w) for i, w in enumerate(witnesses)]
    for label, w in witnesses:
        if len(w.weights) <= j:
            seeds.append((label, [kernel_from_witness(p, w.weights, w.components, j)]))
    win, trace = _search(model, obj, seeds, cfg)
    notes = ["no cardinality bound on J is known; value is the best found at |J| = %d" % j]
    return BoundReport("psi_hat", win.value, "search-best", witness=win.kernels[0], trace=trace,
                       notes=notes, meta={"j_card": j, "winner": win.index, "seed": win.label})


def intrinsic_information(p: JointPmf, cfg: SearchConfig = SearchConfig()) -> BoundReport:
    """Best found ``min I(X;Y|J)`` over degradations ``P_{J|Z}``."""
    x, y, z = roles(p)
    if not z:
        raise PreconditionError("law needs a Z axis")
    nz = _prod(p, z)
    j = cfg.j_card or nz
    model = KernelModel(p.mass, p.names, [KernelSpec(z, ("J",), (j,))])
    obj = ExprObjective(I(x, y, "J"), model.names)
    zshape = tuple(p.size(a) for a in z)
    seeds = [("constant", [_det_kernel(zshape, j, np.zeros(zshape, dtype=int))])]
    if j >= nz:
        seeds.append(("J=Z", [_det_kernel(zshape, j, np.arange(nz).reshape(zshape))]))
    win, trace = _search(model, obj, seeds, cfg)
    return BoundReport("intrinsic_information", win.value, "search-best", witness=win.kernels[0],
                       trace=trace, meta={"j_card": j, "winner": win.index, "seed": win.label})


# --- one-way rate and interactive lower bound --------------------------------

def _swap(p: JointPmf, direction: str) -> JointPmf:
    if direction in ("X->Y", "X→Y"):
        return p
    if direction in ("Y->X", "Y→X"):
        x, y, _ = roles(p)
        mapping = {a: "Y" + a[1:] for a in x}
        mapping.update({a: "X" + a[1:] for a in y})
        return p.rename(mapping)
    raise ValueError(f"direction must be 'X->Y' or 'Y->X', got {direction!r}")


def sow_model(p: JointPmf, u: int, v: int):
    x, y, z = roles(p)
    model = KernelModel(p.mass, p.names, [KernelSpec(x, ("U", "V"), (u, v))])
    gain = I("U", y, "V") - I("U", z, "V") if z else I("U", y, "V")
    return model, ExprObjective(gain, model.names, sign=-1.0)


def sow_evaluate(p: JointPmf, direction: str = "X->Y", cfg: SearchConfig = SearchConfig()) -> BoundReport:
    """Best found ``I(U;Y|V) - I(U;Z|V)`` over ``P_{U,V|X}``: a lower bound on the one-way rate."""
    q = _swap(p, direction)
    x, y, z = roles(q)
    nx = _prod(q, x)
    u = cfg.u_card or nx
    v = cfg.v_card or nx
    model, obj = sow_model(q, u, v)
    xshape = tuple(q.size(a) for a in x)
    flat_x = np.arange(nx).reshape(xshape)
    zero = np.zeros(xshape, dtype=int)

    def uv(ul, vl):
        return [_det_kernel(xshape, u * v, ul * v + vl).reshape(xshape + (u, v))]

    seeds = []
    if u >= nx:
        seeds.append(("U=X", uv(flat_x, zero)))
    seeds.append(("constant", uv(zero, zero)))
    if z and is_deterministic(q, z, x):
        # V = g(X): U = X is then optimal once Z is revealed
        pxz = _marginal(q, x + z).reshape(nx, -1)
        g = np.argmax(pxz, axis=1)
        labels = np.unique(g, return_inverse=True)[1]
        if labels.max() < v and u >= nx:
            seeds.append(("U=X,V=g(X)", uv(flat_x, labels.reshape(xshape))))
    win, trace = _search(model, obj, seeds, cfg)
    return BoundReport("s_ow", -win.value, "search-best", witness=win.kernels[0],
                       trace=[dict(t, best=-t["best"], **({"exact": -t["exact"]} if "exact" in t else {}))
                              for t in trace],
                       meta={"direction": direction, "u_card": u, "v_card": v, "winner": win.index,
                             "seed": win.label})


def _marginal(p: JointPmf, keep) -> np.ndarray:
    drop = tuple(i for i, n in enumerate(p.names) if n not in keep)
    m = p.mass.sum(axis=drop)
    order = [n for n in p.names if n in keep]
    return np.transpose(m, [order.index(n) for n in keep])


def interactive_model(p: JointPmf, k: int, m: int, cards: Sequence[int]):
    x, y, z = roles(p)
    specs = [KernelSpec(x, ("U1",), (cards[0],))]
    if k == 2:
        specs.append(KernelSpec(y + ("U1",), ("U2",), (cards[1],)))
    model = KernelModel(p.mass, p.names, specs)
    gain = Expr()
    for i in range(m, k + 1):
        prev = tuple(f"U{j}" for j in range(1, i))
        other = y if i % 2 else x
        gain = gain + I(f"U{i}", other, prev)
        if z:
            gain = gain - I(f"U{i}", z, prev)
    return model, ExprObjective(gain, model.names, sign=-1.0)


def interactive_lower_bound(p: JointPmf, k: int = 1, m: int = 1, cfg: SearchConfig = SearchConfig()) -> BoundReport:
    """Best found value of the alternating-message lower bound with ``k <= 2`` rounds."""
    if k not in (1, 2):
        from ..errors import SKBoundsError

        raise SKBoundsError(f"unsupported interactive depth k={k}; only k in {{1, 2}}")
    if not 1 <= m <= k:
        raise ValueError("need 1 <= m <= k")
    x, y, z = roles(p)
    nx, ny = _prod(p, x), _prod(p, y)
    u1 = cfg.u_card or nx
    u2 = cfg.v_card or ny
    model, obj = interactive_model(p, k, m, (u1, u2))
    xshape = tuple(p.size(a) for a in x)
    zero_x = np.zeros(xshape, dtype=int)
    k1_seeds = []
    if u1 >= nx:
        k1_seeds.append(("U1=X", _det_kernel(xshape, u1, np.arange(nx).reshape(xshape))))
    k1_seeds.append(("U1 constant", _det_kernel(xshape, u1, zero_x)))
    if k == 1:
        seeds = [(lab, [K]) for lab, K in k1_seeds]
    else:
        yshape = tuple(p.size(a) for a in y) + (u1,)
        const2 = _det_kernel(yshape, u2, np.zeros(yshape, dtype=int))
        best1 = interactive_lower_bound(p, 1, 1, cfg.with_(u_card=u1))
        seeds = [("best k=1, U2 constant", [best1.witness[0], const2])]
        seeds += [(lab + ", U2 constant", [K, const2]) for lab, K in k1_seeds]
        if u2 >= ny:
            ylab = np.broadcast_to(np.arange(ny).reshape(yshape[:-1] + (1,)), yshape)
            seeds += [(lab + ", U2=Y", [K, _det_kernel(yshape, u2, ylab)]) for lab, K in k1_seeds]
    win, trace = _search(model, obj, seeds, cfg)
    return BoundReport("interactive_lower_bound", -win.value, "search-best", witness=win.kernels,
                       trace=trace, meta={"k": k, "m": m, "cards": (u1, u2)[:k], "winner": win.index,
                                          "seed": win.label})


# --- ribbon margin ------------------------------------------------------------

def ribbon_model(p: JointPmf, lam, j: int):
    x, y, z = roles(p)
    groups = (x, y, z)
    model = KernelModel(p.mass, p.names, [KernelSpec(p.names, ("J",), (j,))])
    expr = I("J", x + y + z)
    for l, g in zip(lam, groups):
        if l:
            expr = expr - l * I("J", g)
    return model, ExprObjective(expr, model.names)


def ribbon_margin(p: JointPmf, lam=(0.5, 0.5, 0.5), cfg: SearchConfig = SearchConfig()) -> BoundReport:
    """Best found ``min I(J;X,Y,Z) - sum_i lam_i I(J;.)``; a negative value refutes membership."""
    lam = tuple(float(l) for l in lam)
    if len(lam) != 3 or any(not 0.0 <= l <= 1.0 for l in lam):
        raise ValueError("lam must be three coefficients in [0, 1]")
    x, y, z = roles(p)
    j = cfg.j_card or int(np.prod(p.shape))
    model, obj = ribbon_model(p, lam, j)
    grids = np.indices(p.shape)
    seeds = [("constant", [_det_kernel(p.shape, j, np.zeros(p.shape, dtype=int))])]
    for label, axes in (("J=X", x), ("J=Y", y), ("J=Z", z), ("J=XY", x + y)):
        if axes and _prod(p, axes) <= j:
            seeds.append((label, [_det_kernel(p.shape, j, _flat_index(p, axes, grids))]))
    win, trace = _search(model, obj, seeds, cfg)
    return BoundReport("ribbon_margin", win.value, "search-best", witness=win.kernels[0], trace=trace,
                       notes=["nonnegative value is heuristic evidence of ribbon membership"],
                       meta={"lambda": lam, "j_card": j, "winner": win.index, "seed": win.label})
