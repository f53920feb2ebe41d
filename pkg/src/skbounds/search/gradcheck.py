"""Finite-difference checks of the analytic kernel gradients."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..expr import I
from ..probkit import JointPmf, roles
from .engine import KernelModel, PenaltyObjective
from .delta import inner_model
from .problems import interactive_model, psi_hat_model, ribbon_model, sow_model
from .engine import ExprObjective, KernelSpec


def fd_gradient(model: KernelModel, objective, ks: Sequence[np.ndarray], h: float = 1e-5) -> list[np.ndarray]:
    """Central differences in every kernel entry, entries treated as free coordinates."""
    out = []
    for i, K in enumerate(ks):
        g = np.zeros_like(K)
        for idx in np.ndindex(K.shape):
            plus = [k.copy() for k in ks]
            minus = [k.copy() for k in ks]
            plus[i][idx] += h
            minus[i][idx] -= h
            fp, _, _ = model.value_and_grad(objective, plus)
            fm, _, _ = model.value_and_grad(objective, minus)
            g[idx] = (fp - fm) / (2 * h)
        out.append(g)
    return out


def gradient_errors(model, objective, ks, h: float = 1e-5) -> tuple[float, float, float]:
    """(normwise relative error, absolute error, analytic gradient norm)."""
    _, analytic, _ = model.value_and_grad(objective, ks)
    numeric = fd_gradient(model, objective, ks, h)
    a = np.concatenate([g.ravel() for g in analytic])
    n = np.concatenate([g.ravel() for g in numeric])
    diff = float(np.linalg.norm(a - n))
    return diff / max(np.linalg.norm(n), np.linalg.norm(a), 1e-12), diff, float(np.linalg.norm(a))


def relative_gradient_error(model, objective, ks, h: float = 1e-5) -> float:
    return gradient_errors(model, objective, ks, h)[0]


def objective_catalog(p: JointPmf, rng: np.random.Generator):
    """(name, model, objective) for every search objective on the law ``p``."""
    x, y, z = roles(p)
    nx = int(np.prod([p.size(a) for a in x]))
    ny = int(np.prod([p.size(a) for a in y]))
    out = []
    m, o = psi_hat_model(p, nx * ny)
    out.append(("psi_hat", m, o))
    nz = int(np.prod([p.size(a) for a in z]))
    m = KernelModel(p.mass, p.names, [KernelSpec(z, ("J",), (nz,))])
    out.append(("intrinsic", m, ExprObjective(I(x, y, "J"), m.names)))
    m, o = sow_model(p, nx, nx)
    out.append(("sow", m, o))
    m, o = ribbon_model(p, (0.5, 0.5, 0.5), int(np.prod(p.shape)))
    out.append(("ribbon", m, o))
    for k, mm in ((1, 1), (2, 1), (2, 2)):
        m, o = interactive_model(p, k, mm, (nx, ny))
        out.append((f"interactive k={k} m={mm}", m, o))
    jk = rng.dirichlet(np.ones(nx * ny), size=int(np.prod(p.shape))).reshape(p.shape + (nx * ny,))
    m, gain, constraint = inner_model(p, jk, nx * ny, nx * ny + 1)
    # offset chosen so the penalty branch is active at typical points
    out.append(("psi_delta inner", m, PenaltyObjective(gain, constraint, 0.0, m.names, 10.0)))
    return out
