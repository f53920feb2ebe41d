"""The residual-constrained inf-max bound.

For each candidate ``P_{J|X,Y,Z}`` the inner problem maximises
``I(U;J|V) - I(U;Z|V)`` over ``P_{U,V|X,Y}`` subject to
``I(V;Z) - I(V;J) <= H(Z) - Delta``.  Ascent uses a quadratic penalty with
a geometric weight schedule; every point visited at the end of a round is
kept in a pool together with its exact constraint value, and the inner
value at a given ``Delta`` is the best gain over the pool members that are
exactly feasible there.  The feasible sets are nested in ``Delta``, so a
point found for a larger ``Delta`` is a valid candidate for every smaller
one; sharing the pool across a sweep is what keeps the estimates ordered.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InfeasibleError, PreconditionError
from ..expr import I, evaluate
from ..probkit import JointPmf, entropy, is_deterministic, roles
from ..results import BoundReport
from .config import SearchConfig
from .engine import KernelModel, KernelSpec, PenaltyObjective, minimize, smooth
from .problems import _det_kernel, _flat_index, _prod, psi_hat_search

__all__ = ["psi_delta_evaluate", "psi_delta_sweep", "inner_model"]

_FEAS_TOL = 1e-12


def inner_model(p: JointPmf, jkernel: np.ndarray, u: int, v: int):
    """Joint (X, Y, Z, J) times a kernel ``P_{U,V|X,Y}``, with gain and constraint expressions."""
    x, y, z = roles(p)
    base = p.mass[..., None] * jkernel
    names = p.names + ("J",)
    model = KernelModel(base, names, [KernelSpec(x + y, ("U", "V"), (u, v))])
    gain = I("U", "J", "V") - I("U", z, "V")
    constraint = I("V", z) - I("V", "J")
    return model, gain, constraint


def _inner_seeds(p: JointPmf, u: int, v: int):
    x, y, z = roles(p)
    xy = x + y
    shape = tuple(p.size(a) for a in xy)
    g = np.indices(shape)
    idx = {a: g[i] for i, a in enumerate(xy)}

    def flat(axes):
        if not axes:
            return np.zeros(shape, dtype=int)
        return np.ravel_multi_index([idx[a] for a in axes], [p.size(a) for a in axes])

    u_opts = [("U=XY", flat(xy)), ("U=X", flat(x)), ("U=Y", flat(y)), ("U const", flat(()))]
    v_opts = []
    if z and is_deterministic(p, z, xy):
        pxyz = p.transpose(xy + z).mass.reshape(shape + (-1,))
        zl = np.unique(np.argmax(pxyz, axis=-1), return_inverse=True)[1].reshape(shape)
        v_opts.append(("V=Z", zl))
    v_opts += [("V const", flat(())), ("V=X", flat(x)), ("V=Y", flat(y))]
    seeds = []
    for ul, ulab in u_opts:
        if ulab.max() >= u:
            continue
        for vl, vlab in v_opts:
            if vlab.max() >= v:
                continue
            K = _det_kernel(shape, u * v, ulab * v + vlab).reshape(shape + (u, v))
            seeds.append((f"{ul},{vl}", K))
    return seeds


class _Pool:
    """Points (gain, raw constraint value, kernel) found for one outer J."""

    def __init__(self):
        self.gain: list[float] = []
        self.raw: list[float] = []
        self.kernels: list[np.ndarray] = []

    def add(self, gain, raw, K):
        self.gain.append(float(gain))
        self.raw.append(float(raw))
        self.kernels.append(K)

    def best(self, budget: float):
        """Largest gain among points with ``raw <= budget``."""
        ok = [i for i, r in enumerate(self.raw) if r <= budget + _FEAS_TOL]
        i = max(ok, key=lambda i: (self.gain[i], -i))
        return self.gain[i], self.raw[i], self.kernels[i]


def _evaluate(model, gain, constraint, K):
    t = model.joint([K])
    return evaluate(gain, t, model.names), evaluate(constraint, t, model.names)


def _repair(model, gain, constraint, K, K0, budget, steps=50):
    """Bisection on ``(1-t) K + t K0`` for the smallest ``t`` meeting the budget."""
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        _, r = _evaluate(model, gain, constraint, (1 - mid) * K + mid * K0)
        if r <= budget:
            hi = mid
        else:
            lo = mid
    Kf = (1 - hi) * K + hi * K0
    return Kf, *_evaluate(model, gain, constraint, Kf)


def _fill_pool(p, jkernel, deltas, hz, u, v, cfg, rng):
    model, gain, constraint = inner_model(p, jkernel, u, v)
    pool = _Pool()
    seeds = _inner_seeds(p, u, v)
    const = next(K for lab, K in seeds if lab == "U const,V const")
    scored = []
    for lab, K in seeds:
        g, r = _evaluate(model, gain, constraint, K)
        pool.add(g, r, K)
        scored.append((g, lab, K))
    inner_cfg = cfg.with_(max_iter=max(50, cfg.max_iter // 5))
    for delta in sorted(deltas, reverse=True):
        budget = hz - delta
        feas = [(g, lab, K) for (g, lab, K), r in zip(scored, pool.raw[:len(scored)]) if r <= budget + _FEAS_TOL]
        feas.sort(key=lambda s: -s[0])
        starts = [smooth([K], model, cfg.smoothing)[0] for _, _, K in feas[:2]]
        starts += [model.random_kernels(rng)[0] for _ in range(2)]
        for K in starts:
            mu = cfg.penalty_start
            for _ in range(cfg.penalty_rounds):
                obj = PenaltyObjective(gain, constraint, delta - hz, model.names, mu)
                _, (K,), _ = minimize(model, obj, [K], inner_cfg)
                g, r = _evaluate(model, gain, constraint, K)
                pool.add(g, r, K)
                if r - budget < 1e-6:
                    break
                mu *= 10.0
            if r > budget:
                Kf, g, r = _repair(model, gain, constraint, K, const, budget)
                pool.add(g, r, Kf)
    return model, pool


def psi_delta_sweep(p: JointPmf, deltas: Sequence[float], cfg: SearchConfig = SearchConfig()) -> list[BoundReport]:
    """Heuristic estimates of the inf-max for each ``Delta``, sharing work across the sweep."""
    x, y, z = roles(p)
    if not z:
        raise PreconditionError("law needs a Z axis")
    deltas = [float(d) for d in deltas]
    hz = entropy(p, z)
    for d in deltas:
        if d < 0:
            raise ValueError("Delta must be nonnegative")
        if d > hz + 1e-12:
            raise InfeasibleError(f"Delta = {d:.6g} exceeds H(Z) = {hz:.6g}; the constraint set is empty")
    nxy = _prod(p, x) * _prod(p, y)
    j = cfg.j_card or nxy
    u = cfg.u_card or nxy
    v = cfg.v_card or nxy + 1
    grids = np.indices(p.shape)
    cands = [("J constant", _det_kernel(p.shape, j, np.zeros(p.shape, dtype=int)))]
    nz = _prod(p, z)
    if j >= nz:
        cands.append(("J=Z", _det_kernel(p.shape, j, _flat_index(p, z, grids))))
    ph = psi_hat_search(p, cfg.with_(j_card=j))
    cands.append(("psi-hat best", ph.witness))
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(cfg.restarts + 1)[-1])
    for _ in range(max(1, cfg.restarts // 3)):
        cands.append(("dirichlet", rng.dirichlet(np.ones(j), size=int(np.prod(p.shape))).reshape(p.shape + (j,))))

    pools = []
    for lab, K in cands:
        model, pool = _fill_pool(p, K, deltas, hz, u, v, cfg, rng)
        ixy = evaluate(I(x, y, "J"), model.base, model.names[:-2])
        pools.append((lab, K, ixy, pool))

    reports = []
    for d in deltas:
        rows = []
        for idx, (lab, K, ixy, pool) in enumerate(pools):
            g, r, Kuv = pool.best(hz - d)
            rows.append((ixy + g, idx, lab, K, Kuv, r, g, ixy))
        val, idx, lab, K, Kuv, r, g, ixy = min(rows, key=lambda t: (t[0], t[1]))
        reports.append(BoundReport(
            "psi_delta", val, "search-best", witness=(K, Kuv),
            residuals={"constraint": max(0.0, r - (hz - d))},
            trace=[{"candidate": t[2], "value": t[0], "inner": t[6]} for t in rows],
            notes=["heuristic estimate of an inf-max; not a certified bound",
                   "no cardinality bound on J is known; |J| = %d" % j],
            meta={"delta": d, "H(Z)": hz, "j_card": j, "u_card": u, "v_card": v, "outer": lab,
                  "I(X;Y|J)": ixy, "inner": g, "psi_hat_search": ph.value},
        ))
    return reports


def psi_delta_evaluate(p: JointPmf, delta: float, cfg: SearchConfig = SearchConfig()) -> BoundReport:
    return psi_delta_sweep(p, [delta], cfg)[0]
