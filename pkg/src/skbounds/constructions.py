"""Closed-form decompositions for binary and binary-by-ternary sources.

Two kinds of mixture certify the two extremes of the one-shot bound:

* a *T witness* writes ``P_XY`` as a mixture of product laws that all share
  the Z-marginal of ``P``; then ``I(T;Z) = I(X;Y|T) = I(T;Z|X,Y) = 0`` and
  the bound equals ``I(X;Y)``;
* a *J split* writes ``P_XY`` as product laws whose supports never share a
  Z value ambiguously; plugging it in gives ``I(X;Y|J) = I(X,Y;J|Z) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .envelope.grid import simplex_grid
from .envelope.lp import LinearProgram, lp_minimize
from .errors import DegenerateCaseError, InfeasibleError, PreconditionError, ShapeError
from .probkit import (
    FunctionTable,
    JointPmf,
    apply_function,
    conditional_mutual_information,
    covariance_sign,
    entropy,
    is_deterministic,
    marginalize,
    mutual_information,
)
from .results import DecompositionWitness

__all__ = [
    "SplitJ",
    "ConditionNotMet",
    "HullVerdict",
    "xor_witness",
    "monotone_split",
    "ternary_witness",
    "hull_membership",
    "verify_witness",
    "erasure_capacity",
    "erasure_source",
    "structured_splits",
]

_OPS = {"AND": FunctionTable.and_, "OR": FunctionTable.or_, "SUM": FunctionTable.sum_}


class SplitJ(DecompositionWitness):
    """A J split whose components are product laws on X x Y."""

    def __post_init__(self):
        super().__post_init__()
        for q in self.components:
            if mutual_information(q, "X", "Y") > 1e-12:
                raise ValueError("split component is not a product law")


@dataclass(frozen=True)
class ConditionNotMet:
    """One or both sufficient inequalities failed; says nothing about the bound itself."""

    violated: tuple[str, ...]
    values: dict[str, float] = field(default_factory=dict)

    def __bool__(self):
        return False


@dataclass
class HullVerdict:
    inside: bool
    witness: DecompositionWitness | None
    method: str
    k: int | None = None
    message: str = ""


def _pxy(p: JointPmf, shape=None) -> np.ndarray:
    if "X" not in p.names or "Y" not in p.names:
        raise ShapeError(f"need X and Y axes, got {p.names}")
    m = marginalize(p, ("X", "Y")).mass if len(p.names) > 2 else p.transpose(("X", "Y")).mass
    if shape is not None and m.shape != shape:
        raise ShapeError(f"expected X, Y of sizes {shape}, got {m.shape}")
    return np.array(m)


def _with_z(mats, f: FunctionTable) -> list[JointPmf]:
    out = []
    for m in mats:
        m = np.clip(m, 0.0, None)
        out.append(apply_function(JointPmf(("X", "Y"), m / m.sum()), f))
    return out


def _merge(weights, mats):
    """Drop zero weights and merge components that coincide."""
    ws, ms = [], []
    for w, m in zip(weights, mats):
        if w <= 0:
            continue
        for i, other in enumerate(ms):
            if np.abs(other - m).max() <= 1e-15:
                ws[i] += w
                break
        else:
            ws.append(float(w))
            ms.append(m)
    return np.array(ws), ms


def _roots(b: float, c: float) -> tuple[float, float]:
    """Real roots ``x0 <= x1`` of ``x^2 - b x + c`` (discriminant clamped at 0)."""
    disc = max(b * b - 4.0 * c, 0.0)
    sq = np.sqrt(disc)
    x1 = 0.5 * (b + sq)
    x0 = c / x1 if x1 > 0 else 0.5 * (b - sq)
    return min(x0, x1), max(x0, x1)


def _xor_parts(p: np.ndarray):
    """Weights, 2x2 product components and parameters of the quadratic-root witness."""
    p00, p01, p10, p11 = p[0, 0], p[0, 1], p[1, 0], p[1, 1]
    if covariance_sign(p) <= 0:
        x0, x1 = _roots(p01 + p10, p00 * p11)
        lam = 0.5 if x1 - x0 <= 1e-15 else float(np.clip((x1 - p01) / (x1 - x0), 0.0, 1.0))
        a = np.array([[p00, x1], [x0, p11]])
        b = np.array([[p00, x0], [x1, p11]])
        branch = "off-diagonal"
    else:
        x0, x1 = _roots(p00 + p11, p01 * p10)
        lam = 0.5 if x1 - x0 <= 1e-15 else float(np.clip((x1 - p00) / (x1 - x0), 0.0, 1.0))
        a = np.array([[x1, p01], [p10, x0]])
        b = np.array([[x0, p01], [p10, x1]])
        branch = "diagonal"
    return [1.0 - lam, lam], [a, b], {"x0": float(x0), "x1": float(x1), "lambda": lam, "branch": branch}


def xor_witness(p_xy: JointPmf) -> DecompositionWitness:
    """T witness for ``Z = X xor Y`` on any binary ``P_XY``."""
    p = _pxy(p_xy, (2, 2))
    weights, mats, params = _xor_parts(p)
    weights, mats = _merge(weights, mats)
    return DecompositionWitness(weights, tuple(_with_z(mats, FunctionTable.xor())), kind="T", params=params)


def _isolated_split(p: np.ndarray, f: FunctionTable, flip: tuple[int, int]):
    """Split with a point mass on the cell ``(1,1)`` after flipping the given bits."""
    q = p[::-1] if flip[0] else p
    q = q[:, ::-1] if flip[1] else q
    cov = covariance_sign(q)
    if cov <= 0:
        raise PreconditionError("the split needs positive covariance after relabeling")
    p00, p11 = q[0, 0], q[1, 1]
    if p00 <= 0:
        raise DegenerateCaseError("p00 = 0 leaves alpha undefined")
    alpha = p00 / (p00 - cov)
    corner = 1.0 - alpha * (1.0 - p11)
    if alpha < 1.0 - 1e-12 or corner < -1e-12:
        raise AssertionError(f"alpha-split left [0,1]: alpha={alpha}, corner={corner}")
    comp1 = alpha * q
    comp1[1, 1] = max(corner, 0.0)
    point = np.zeros((2, 2))
    point[1, 1] = 1.0
    mats = [point, comp1]
    weights = [1.0 - 1.0 / alpha, 1.0 / alpha]
    for ax, fl in enumerate(flip):
        if fl:
            mats = [np.flip(m, axis=ax) for m in mats]
    weights, mats = _merge(weights, mats)
    params = {"alpha": float(alpha), "P(J=1)": float(1.0 / alpha), "flip_x": flip[0], "flip_y": flip[1]}
    return SplitJ(weights, tuple(_with_z(mats, f)), kind="J", params=params)


def monotone_split(p_xy: JointPmf, op: str = "AND") -> DecompositionWitness:
    """T witness when ``Cov(X,Y) <= 0``, otherwise the alpha split certifying a zero bound.

    ``op`` is ``SUM``, ``AND`` or ``OR``.  OR reduces to AND by flipping both bits.
    """
    op = op.upper()
    if op not in _OPS:
        raise ValueError(f"op must be one of {sorted(_OPS)}")
    p = _pxy(p_xy, (2, 2))
    f = _OPS[op]()
    if covariance_sign(p) <= 0:
        weights, mats, params = _xor_parts(p)
        weights, mats = _merge(weights, mats)
        return DecompositionWitness(weights, tuple(_with_z(mats, f)), kind="T", params=params)
    flip = (1, 1) if op == "OR" else (0, 0)
    return _isolated_split(p, f, flip)


def _table_from_law(p: JointPmf) -> FunctionTable | None:
    if set(p.names) != {"X", "Y", "Z"}:
        return None
    m = p.transpose(("X", "Y", "Z")).mass
    if not is_deterministic(p, ("Z",), ("X", "Y")):
        return None
    return FunctionTable(np.argmax(m, axis=2), tuple(range(m.shape[2])))


def structured_splits(p: JointPmf) -> list[tuple[str, DecompositionWitness]]:
    """Known zero-value splits for a binary function source, as (label, witness) pairs.

    For every relabeling of the bits that isolates the cell ``(1,1)`` in the
    table and makes the covariance positive, the alpha split applies.
    """
    f = _table_from_law(p)
    if f is None or f.cells.shape != (2, 2):
        return []
    pxy = _pxy(p, (2, 2))
    out = []
    for flip in ((0, 0), (1, 1), (0, 1), (1, 0)):
        c = f.cells[::-1] if flip[0] else f.cells
        c = c[:, ::-1] if flip[1] else c
        if np.count_nonzero(c == c[1, 1]) != 1:
            continue
        q = pxy[::-1] if flip[0] else pxy
        q = q[:, ::-1] if flip[1] else q
        if covariance_sign(q) <= 0 or q[0, 0] <= 0:
            continue
        w = _isolated_split(pxy, f, flip)
        comps = tuple(c_.transpose(p.names) for c_ in w.components)
        out.append((f"alpha-split flip={flip}", DecompositionWitness(w.weights, comps, "J", w.params)))
    return out


# --- binary x ternary ------------------------------------------------------

def ternary_witness(p_xy: JointPmf, f: FunctionTable | None = None):
    """T witness for ``Z = (X + Y) mod 2`` on a 2 x 3 law, or :class:`ConditionNotMet`."""
    p = _pxy(p_xy, (2, 3))
    f = f or FunctionTable.mod2_sum(2, 3)
    if not np.array_equal(f.cells % 2, FunctionTable.mod2_sum(2, 3).cells) or f.cells.shape != (2, 3):
        raise ShapeError("ternary_witness needs the (x + y) mod 2 table on 2 x 3")
    alpha = p[0, 0] + p[0, 2] + p[1, 1]
    abar = 1.0 - alpha
    if alpha <= 0 or abar <= 0:
        raise DegenerateCaseError(f"P_Z(0) = {alpha:.3g}: Z is constant")
    c1 = p[0, 0] / alpha + p[1, 2] / abar
    c2 = p[0, 2] / alpha + p[1, 0] / abar
    violated = []
    if c1 > 1.0 + 1e-12:
        violated.append("p00/alpha + p12/(1-alpha) <= 1")
    if c2 > 1.0 + 1e-12:
        violated.append("p02/alpha + p10/(1-alpha) <= 1")
    if violated:
        return ConditionNotMet(tuple(violated), {"first": float(c1), "second": float(c2), "alpha": float(alpha)})

    p00, p02, p10, p12 = p[0, 0], p[0, 2], p[1, 0], p[1, 2]
    if p00 <= 0:
        raise DegenerateCaseError("p00 = 0: omega = p00/(alpha r) and t are 0/0")
    r = 1.0 if p10 <= 0 else min(1.0, abar * p00 / (alpha * p10))
    omega = p00 / (alpha * r)
    t = alpha * p10 * r / (abar * p00)
    den = alpha * r - p00
    if abs(den) <= 1e-15:
        if p12 > 0 or p02 > 0:
            raise DegenerateCaseError(
                f"alpha r = p00 = {p00:.6g} while p02 = {p02:.3g}, p12 = {p12:.3g} are nonzero")
        s = ell = 0.0
    else:
        s = alpha * p12 * r / (abar * den)
        ell = p02 * r / den
    params = {"alpha": float(alpha), "r": r, "omega": omega, "t": t, "s": s, "ell": ell}
    for name in ("r", "omega", "t", "s", "ell"):
        v = params[name]
        if v < -1e-12 or v > 1 + 1e-12:
            raise AssertionError(f"parameter {name} = {v!r} left [0, 1]")
        params[name] = float(min(max(v, 0.0), 1.0))
    r, omega, t, s, ell = (params[n] for n in ("r", "omega", "t", "s", "ell"))
    B = np.array([[alpha * r, abar * (1 - t), 0.0], [abar * t, alpha * (1 - r), 0.0]])
    C = np.array([[0.0, abar * (1 - s), alpha * ell], [0.0, alpha * (1 - ell), abar * s]])

    weights, mats = [], []
    for wt, M, cols in ((omega, B, [0, 1]), (1.0 - omega, C, [1, 2])):
        if wt <= 0:
            continue
        sub = M[:, cols]
        sw, sm, _ = _xor_parts(sub if cols == [0, 1] else sub[:, ::-1])
        for w2, m2 in zip(sw, sm):
            full = np.zeros((2, 3))
            full[:, cols] = m2 if cols == [0, 1] else m2[:, ::-1]
            weights.append(wt * w2)
            mats.append(full)
    weights, mats = _merge(weights, mats)
    params["conditions"] = (float(c1), float(c2))
    return DecompositionWitness(weights, tuple(_with_z(mats, FunctionTable.mod2_sum(2, 3))), kind="T", params=params)


# --- hull membership -------------------------------------------------------

def _product_atoms(f: FunctionTable, pz: np.ndarray, k: int) -> np.ndarray:
    """Exact product laws ``u (x) v`` with Z-marginal ``pz``: u on the grid, v a vertex of its fibre."""
    nx, ny = f.cells.shape
    atoms = []

    def fibre(M, n):
        r = np.linalg.matrix_rank(M)
        out = []
        for cols in combinations(range(n), r):
            sub = M[:, cols]
            if np.linalg.matrix_rank(sub) < r:
                continue
            sol, *_ = np.linalg.lstsq(sub, pz, rcond=None)
            if sol.min() < -1e-12 or np.abs(sub @ sol - pz).max() > 1e-12:
                continue
            v = np.zeros(n)
            v[list(cols)] = np.clip(sol, 0.0, None)
            out.append(v / v.sum())
        return out

    onehot = np.eye(len(pz))[f.cells]  # (nx, ny, nz)
    for u in simplex_grid(nx, k).atoms:
        M = np.einsum("x,xyz->zy", u, onehot)
        for v in fibre(M, ny):
            atoms.append(np.outer(u, v).ravel())
    for v in simplex_grid(ny, k).atoms:
        M = np.einsum("y,xyz->zx", v, onehot)
        for u in fibre(M, nx):
            atoms.append(np.outer(u, v).ravel())
    if not atoms:
        return np.zeros((0, nx * ny))
    atoms = np.unique(np.round(np.array(atoms), 15), axis=0)
    return atoms


def hull_membership(p_xy: JointPmf, f: FunctionTable, k: int = 40) -> HullVerdict:
    """Is ``P_XY`` a mixture of product laws with the same Z-marginal?

    Closed forms are tried first; otherwise an LP over exact product atoms
    built from a ``1/k`` grid decides.  A negative LP answer only means no
    decomposition exists among those atoms.
    """
    p = _pxy(p_xy, f.cells.shape)
    law = JointPmf(("X", "Y"), p)
    full = apply_function(law, f)
    pz = full.mass.sum(axis=(0, 1))
    if mutual_information(law, "X", "Y") <= 1e-15:
        w = DecompositionWitness(np.ones(1), (full,), kind="T")
        return HullVerdict(True, w, "product law")
    cells = f.cells
    if cells.shape == (2, 2):
        weights, mats, params = _xor_parts(p)
        # the off-diagonal branch keeps p00, p11 and the sum p01 + p10; the diagonal one the reverse
        if (params["branch"] == "off-diagonal" and cells[0, 1] == cells[1, 0]) or \
                (params["branch"] == "diagonal" and cells[0, 0] == cells[1, 1]):
            weights, mats = _merge(weights, mats)
            w = DecompositionWitness(weights, tuple(_with_z(mats, f)), kind="T", params=params)
            return HullVerdict(True, w, "closed form: quadratic-root witness")
    if cells.shape == (2, 3) and np.array_equal(cells, FunctionTable.mod2_sum(2, 3).cells):
        try:
            w = ternary_witness(law)
        except DegenerateCaseError:
            w = None
        if w:
            return HullVerdict(True, w, "closed form: ternary witness")

    atoms = _product_atoms(f, pz, k)
    if len(atoms):
        try:
            res = lp_minimize(LinearProgram(np.zeros(len(atoms)), atoms.T, p.ravel()))
        except InfeasibleError:
            res = None
        if res is not None:
            used = res.x > 0
            mats = [a.reshape(p.shape) for a in atoms[used]]
            w = DecompositionWitness(res.x[used] / res.x[used].sum(), tuple(_with_z(mats, f)), kind="T",
                                     params={"k": k})
            resid = verify_witness(full, w, "T")
            if max(resid.values()) <= 1e-9:
                return HullVerdict(True, w, "grid LP", k=k)
    return HullVerdict(False, None, "grid LP", k=k, message=f"not found at resolution k={k}")


# --- verification ----------------------------------------------------------

def verify_witness(p: JointPmf, w: DecompositionWitness, kind: str = "T") -> dict[str, float]:
    """Residual map of a witness against the law ``p`` on (X, Y, Z)."""
    if kind not in ("T", "J"):
        raise ValueError("kind must be 'T' or 'J'")
    comps = tuple(q.transpose(p.names) for q in w.components)
    w2 = DecompositionWitness(w.weights, comps, kind=w.kind, params=w.params)
    bary = float(np.abs(w2.barycenter() - p.mass).max())
    joint = w2.joint(kind)
    if kind == "T":
        return {
            "barycenter": bary,
            "I(T;Z)": abs(mutual_information(joint, "T", "Z")),
            "I(X;Y|T)": abs(conditional_mutual_information(joint, "X", "Y", "T")),
            "I(T;Z|X,Y)": abs(conditional_mutual_information(joint, "T", "Z", ("X", "Y"))),
        }
    return {
        "barycenter": bary,
        "I(X;Y|J)": abs(conditional_mutual_information(joint, "X", "Y", "J")),
        "I(X,Y;J|Z)": abs(conditional_mutual_information(joint, ("X", "Y"), "J", "Z")),
    }


# --- erasure source ----------------------------------------------------------

def _g_labels(g, nx: int) -> np.ndarray:
    g = np.asarray(g).ravel()
    if len(g) != nx:
        raise ShapeError(f"g has {len(g)} entries for {nx} symbols")
    return np.unique(g, return_inverse=True)[1]


def erasure_capacity(p_x: JointPmf, g, eps: float) -> float:
    """``(1 - eps) H(X|Z)`` with ``Z = g(X)``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    px = p_x.mass.ravel()
    z = _g_labels(g, len(px))
    pz = np.bincount(z, weights=px)
    hx = entropy(p_x, p_x.names)
    hz = float(-(pz[pz > 0] * np.log2(pz[pz > 0])).sum())
    return (1.0 - eps) * (hx - hz)


def erasure_source(p_x: JointPmf, g, eps: float) -> JointPmf:
    """Joint law on (X, Y, Z): Y is X with probability ``1 - eps``, else the extra letter ``e``.

    ``Y`` has ``|X| + 1`` letters; the last one is the erasure ``e``.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    px = p_x.mass.ravel()
    nx = len(px)
    z = _g_labels(g, nx)
    mass = np.zeros((nx, nx + 1, z.max() + 1))
    for x in range(nx):
        mass[x, x, z[x]] = (1.0 - eps) * px[x]
        mass[x, nx, z[x]] += eps * px[x]
    return JointPmf(("X", "Y", "Z"), mass)
