"""Executable checks of identities, inequalities and structural facts about the bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .envelope.psi import delta_bar, psi_hat_envelope, psi_hat_objective
from .errors import PreconditionError
from .probkit import (
    ConditionalPmf,
    JointPmf,
    attach_channel,
    conditional_mutual_information as cmi,
    entropy,
    is_deterministic,
    tensor_power,
)
from .search.config import SearchConfig
from .search.problems import kernel_from_witness, psi_hat_search

__all__ = [
    "FuzzSpec",
    "ProtocolMaps",
    "th1_identity_check",
    "th1_sides",
    "thm5_check",
    "tensorization_check",
    "rectangle_check",
    "km_bound_check",
    "set_partitions",
]


@dataclass(frozen=True)
class FuzzSpec:
    """Seeded Dirichlet(1) sampling of joint laws."""

    seed: int = 0
    trials: int = 100
    sizes: dict = field(default_factory=lambda: {"X": 2, "Y": 2, "Z": 2})

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(int(s) < 1 for s in self.sizes.values()):
            raise ValueError("sizes must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def sample(self, rng: np.random.Generator, names=None) -> JointPmf:
        names = tuple(names or self.sizes)
        shape = tuple(int(self.sizes[n]) for n in names)
        return JointPmf(names, rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape))


# --- coupling identity -------------------------------------------------------

def th1_sides(q: JointPmf) -> tuple[float, float]:
    """Both sides of the coupling identity on a law over X, Y, Z, T, J."""
    X, Y, Z, T, J = "X", "Y", "Z", "T", "J"
    XY, XYZ = (X, Y), (X, Y, Z)
    lhs = cmi(q, X, Y) - (cmi(q, X, Y, J) + cmi(q, XY, J, Z))
    rhs = (cmi(q, T, Z) + cmi(q, X, Y, T) + cmi(q, T, Z, XY) + 2 * cmi(q, T, J, XYZ)
           - (cmi(q, X, Y, (J, T)) + cmi(q, XY, J, (T, Z)))
           - cmi(q, J, T, X) - cmi(q, J, T, Y) - cmi(q, T, Z, J) - cmi(q, T, Z, (X, Y, J)))
    return lhs, rhs


@dataclass
class IdentityReport:
    max_discrepancy: float
    trials: int
    worst_trial: int


def th1_identity_check(fuzz: FuzzSpec = FuzzSpec(trials=1000, sizes={"X": 3, "Y": 3, "Z": 3, "T": 3, "J": 3}),
                       coupled: bool = True) -> IdentityReport:
    """Max ``|LHS - RHS|`` over random laws.

    With ``coupled`` the law is ``P_XYZ`` times independent kernels
    ``P_{T|XYZ}`` and ``P_{J|XYZ}``; otherwise the five-variable law is drawn
    directly (the identity is pure Shannon algebra and holds either way).
    """
    sizes = {n: int(fuzz.sizes.get(n, 2)) for n in ("X", "Y", "Z", "T", "J")}
    if any(s > 3 for s in sizes.values()):
        raise ValueError("identity check keeps every alphabet at size <= 3")
    rng = fuzz.rng()
    worst, at = 0.0, 0
    for i in range(fuzz.trials):
        if coupled:
            base_shape = (sizes["X"], sizes["Y"], sizes["Z"])
            p = JointPmf(("X", "Y", "Z"), rng.dirichlet(np.ones(int(np.prod(base_shape)))).reshape(base_shape))
            for name in ("T", "J"):
                rows = rng.dirichlet(np.ones(sizes[name]), size=int(np.prod(base_shape)))
                k = ConditionalPmf(("X", "Y", "Z"), (name,), rows.reshape(base_shape + (sizes[name],)))
                p = attach_channel(p, k)
            q = p
        else:
            q = JointPmf(("X", "Y", "Z", "T", "J"),
                         rng.dirichlet(np.ones(int(np.prod(list(sizes.values()))))).reshape(tuple(sizes.values())))
        lhs, rhs = th1_sides(q)
        d = abs(lhs - rhs)
        if d > worst:
            worst, at = d, i
    return IdentityReport(worst, fuzz.trials, at)


# --- two-source comparison inequality -----------------------------------------

@dataclass
class Thm5Report:
    trials: int
    violations: list
    max_excess: float
    rows: list


def thm5_check(fuzz: FuzzSpec = FuzzSpec(trials=200), k: int = 10) -> Thm5Report:
    """Difference of the bounds on two triples against the four-term right side.

    Both bounds come from envelopes at resolution ``k``; each has a slack from
    its LP dual.  A trial is a violation when ``LHS - RHS`` exceeds twice the
    larger slack plus ``1e-6``; ``LHS`` uses the first envelope value (an
    upper estimate) minus the second.
    """
    names = ("X", "Y", "Z", "Xp", "Yp", "Zp")
    rng = fuzz.rng()
    rows, violations = [], []
    max_excess = -np.inf
    for i in range(fuzz.trials):
        q = JointPmf(names, rng.dirichlet(np.ones(64)).reshape((2,) * 6))
        a = _marg(q, ("X", "Y", "Z"), ("X", "Y", "Z"))
        b = _marg(q, ("Xp", "Yp", "Zp"), ("X", "Y", "Z"))
        ea = psi_hat_envelope(a, k, certify=True)
        eb = psi_hat_envelope(b, k, certify=True)
        rhs = (cmi(q, ("X", "Y"), "Zp", "Z") + cmi(q, ("Yp", "Zp"), "X", "Xp")
               + cmi(q, ("Xp", "Zp"), "Y", "Yp") + cmi(q, "X", "Y", ("Xp", "Yp", "Zp")))
        lhs = ea.value - eb.value
        slack = max(ea.meta["slack"], eb.meta["slack"])
        excess = lhs - rhs - (2 * slack + 1e-6)
        max_excess = max(max_excess, excess)
        row = {"trial": i, "lhs": lhs, "rhs": rhs, "slack": slack, "excess": excess}
        rows.append(row)
        if excess > 0:
            violations.append(row)
    return Thm5Report(fuzz.trials, violations, float(max_excess), rows)


def _marg(q: JointPmf, keep, rename) -> JointPmf:
    drop = tuple(i for i, n in enumerate(q.names) if n not in keep)
    m = q.mass.sum(axis=drop)
    order = [n for n in q.names if n in keep]
    m = np.transpose(m, [order.index(n) for n in keep])
    return JointPmf(tuple(rename), m)


# --- tensorization ------------------------------------------------------------

@dataclass
class TensorizationReport:
    single: float
    iid_value: float
    iid_residual: float
    search_best: float
    gap: float
    witness_source: str


def _best_single_witness(p: JointPmf):
    from .constructions import structured_splits

    env = psi_hat_envelope(p)
    cands = [("envelope", env.witness)] + list(structured_splits(p))
    const = np.zeros(p.shape + (1,))
    const[..., 0] = 1.0
    best = (psi_hat_objective(attach_channel(p, ConditionalPmf(p.names, ("J",), const))), const, "constant")
    for label, w in cands:
        j = len(w.weights)
        K = kernel_from_witness(p, w.weights, w.components, j)
        joint = attach_channel(p, ConditionalPmf(p.names, ("J",), K))
        val = psi_hat_objective(joint)
        if val < best[0]:
            best = (val, K, label)
    return best


def tensorization_check(p: JointPmf, cfg: SearchConfig = SearchConfig(restarts=2, max_iter=800)) -> TensorizationReport:
    """Two-letter check: the product witness doubles the value and search does not beat it."""
    if set(p.names) != {"X", "Y", "Z"} or p.size("X") != 2 or p.size("Y") != 2:
        raise PreconditionError("tensorization check expects binary X, Y and a Z axis")
    if not is_deterministic(p, ("Z",), ("X", "Y")):
        raise PreconditionError("tensorization check expects Z = f(X, Y)")
    p = p.transpose(("X", "Y", "Z"))
    single, K, label = _best_single_witness(p)
    p2 = tensor_power(p, 2)
    K2 = np.einsum("abcj,defk->abcdefjk", K, K)
    j = K.shape[-1]
    K2 = K2.reshape(p2.shape + (j * j,))
    joint2 = attach_channel(p2, ConditionalPmf(p2.names, ("J",), K2))
    iid = psi_hat_objective(joint2)
    search = psi_hat_search(p2, cfg)
    return TensorizationReport(single, iid, abs(iid - 2 * single), search.value, search.value - 2 * single, label)


# --- rectangle property --------------------------------------------------------

@dataclass(frozen=True)
class ProtocolMaps:
    """Deterministic one-shot messages ``F1 = g1(X^n)``, ``F2 = g2(Y^n)`` on flat block indices."""

    n: int
    g1: tuple[int, ...]
    g2: tuple[int, ...]

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("block length must be 1 or 2")
        object.__setattr__(self, "g1", tuple(int(v) for v in self.g1))
        object.__setattr__(self, "g2", tuple(int(v) for v in self.g2))


def set_partitions(n: int, max_blocks: int):
    """Restricted-growth strings of length ``n`` with at most ``max_blocks`` labels."""
    if n == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(min(top + 2, max_blocks)):
            yield from rec(prefix + [v], max(top, v))

    yield from rec([0], 0)


def _block_law(pxy: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Block law on (X^n, Y^n) and the Z^n label of each cell, Z = (x + y) mod m letterwise."""
    nx, ny = pxy.shape
    m = max(nx, ny)
    law = pxy
    z = np.add.outer(np.arange(nx), np.arange(ny)) % m
    zl = z
    for _ in range(n - 1):
        law = np.einsum("ab,cd->acbd", law, pxy).reshape(law.shape[0] * nx, law.shape[1] * ny)
        zl = (zl[:, None, :, None] * m + z[None, :, None, :]).reshape(law.shape)
    return law, zl


def _cond_entropies(law, zl, g1, g2):
    """H(Z^n | F) and H(X^n, Y^n | F) for deterministic messages."""
    g1 = np.asarray(g1)
    g2 = np.asarray(g2)
    f = g1[:, None] * (g2.max() + 1) + g2[None, :]
    hxy_f = 0.0
    hz_f = 0.0
    for v in np.unique(f):
        mask = f == v
        pf = law[mask].sum()
        if pf <= 0:
            continue
        cells = law[mask] / pf
        hxy_f += pf * float(-(cells[cells > 0] * np.log2(cells[cells > 0])).sum())
        zc = np.bincount(zl[mask], weights=law[mask]) / pf
        zc = zc[zc > 0]
        hz_f += pf * float(-(zc * np.log2(zc)).sum())
    return hz_f, hxy_f


@dataclass
class RectangleReport:
    n: int
    pairs_checked: int
    antecedent_true: int
    counterexamples: list
    exhaustive: bool


def rectangle_check(nx: int = 2, ny: int = 2, n: int = 1, *, law: np.ndarray | None = None,
                    max_messages: int = 4, pair_cap: int = 200_000, samples: int = 20_000,
                    seed: int = 0, tol: float = 1e-12) -> RectangleReport:
    """Every pair of deterministic maps revealing ``Z^n`` must reveal ``(X^n, Y^n)``.

    ``Z = (X + Y) mod max(|X|, |Y|)``, so a fixed ``x`` and ``z`` pin down
    ``y`` and vice versa.  Maps range over set partitions of the block
    alphabets into at most ``max_messages`` blocks; pairs are enumerated
    when there are at most ``pair_cap`` of them and sampled otherwise.
    """
    rng = np.random.default_rng(seed)
    if law is None:
        law = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
        law = 0.5 * law + 0.5 / (nx * ny)
    law = np.asarray(law, dtype=float)
    if law.shape != (nx, ny):
        raise ValueError("law shape does not match the sizes")
    if law.min() <= 0:
        raise PreconditionError("rectangle check requires a full-support law")
    block, zl = _block_law(law / law.sum(), n)
    p1 = list(set_partitions(block.shape[0], max_messages))
    p2 = list(set_partitions(block.shape[1], max_messages))
    total = len(p1) * len(p2)
    exhaustive = total <= pair_cap
    if exhaustive:
        pairs = product(p1, p2)
    else:
        pairs = ((p1[rng.integers(len(p1))], p2[rng.integers(len(p2))]) for _ in range(samples))
    checked = revealing = 0
    bad = []
    for g1, g2 in pairs:
        checked += 1
        hz, hxy = _cond_entropies(block, zl, g1, g2)
        if hz <= tol:
            revealing += 1
            if hxy > tol:
                bad.append(ProtocolMaps(n, g1, g2))
    return RectangleReport(n, checked, revealing, bad, exhaustive)


# --- non-interactive residual bound -----------------------------------------------

def km_bound_check(p_xy: JointPmf, maps: ProtocolMaps, dbar: float | None = None) -> float:
    """``(1/n) I(F; X^n Y^n) + (2/n) H(Z^n|F) - H(X,Y) - dbar`` for deterministic maps; should be >= 0."""
    pxy = p_xy.transpose(("X", "Y")).mass if set(p_xy.names) == {"X", "Y"} else \
        _marg(p_xy, ("X", "Y"), ("X", "Y")).mass
    if pxy.shape != (2, 2):
        raise PreconditionError("the residual bound is checked for binary X, Y with Z = X xor Y")
    if dbar is None:
        dbar = delta_bar(JointPmf(("X", "Y"), pxy)).value
    n = maps.n
    block, zl = _block_law(pxy, n)
    if len(maps.g1) != block.shape[0] or len(maps.g2) != block.shape[1]:
        raise ValueError("maps do not cover the block alphabets")
    hz_f, _ = _cond_entropies(block, zl, maps.g1, maps.g2)
    g1, g2 = np.asarray(maps.g1), np.asarray(maps.g2)
    f = g1[:, None] * (g2.max() + 1) + g2[None, :]
    pf = np.bincount(f.ravel(), weights=block.ravel())
    pf = pf[pf > 0]
    h_f = float(-(pf * np.log2(pf)).sum())  # deterministic maps: I(F; X^n Y^n) = H(F)
    hxy = float(-(pxy[pxy > 0] * np.log2(pxy[pxy > 0])).sum())
    return h_f / n + 2.0 * hz_f / n - hxy - dbar
