"""Dense finite-alphabet laws and Shannon measures (all values in bits).

A :class:`JointPmf` is a nonnegative tensor with one named axis per random
variable.  Measures take axis names, so ``entropy(p, ["X", "Z"])`` is
``H(X, Z)`` under ``p``.  Conventions: ``0 log 0 = 0`` and conditioning on a
zero-probability cell contributes nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AxisError, CapacityError, ShapeError, ValidationError

NORM_TOL = 1e-9
DEFAULT_CELL_CAP = 10**6

__all__ = [
    "AlphabetSpec",
    "JointPmf",
    "ConditionalPmf",
    "FunctionTable",
    "entropy",
    "conditional_mutual_information",
    "mutual_information",
    "marginalize",
    "apply_function",
    "attach_channel",
    "tensor_power",
    "covariance_sign",
]


@dataclass(frozen=True)
class AlphabetSpec:
    names: tuple[str, ...]
    sizes: tuple[int, ...]
    labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(set(self.names)) != len(self.names):
            raise AxisError(f"duplicate axis names in {self.names}")
        if len(self.names) != len(self.sizes):
            raise ShapeError("names and sizes differ in length")
        if any(s < 1 for s in self.sizes):
            raise ShapeError(f"alphabet sizes must be >= 1, got {self.sizes}")
        if self.labels is not None:
            labels = tuple(tuple(str(s) for s in lab) for lab in self.labels)
            if tuple(len(lab) for lab in labels) != self.sizes:
                raise ShapeError("label lists do not match sizes")
            object.__setattr__(self, "labels", labels)

    def size(self, name: str) -> int:
        return self.sizes[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AxisError(f"unknown axis {name!r}; have {self.names}") from None


def _check_mass(mass: np.ndarray, what: str) -> bool:
    """Validate nonnegativity and normalization; return True if renormalized."""
    if not np.all(np.isfinite(mass)):
        raise ValidationError(f"{what} has non-finite entries")
    if mass.size and mass.min() < 0:
        raise ValidationError(f"{what} has a negative entry ({mass.min():g})")
    drift = abs(float(mass.sum()) - 1.0)
    if drift > NORM_TOL:
        raise ValidationError(f"{what} sums to {mass.sum():.12g}; drift {drift:.3g} exceeds {NORM_TOL:g}")
    return drift > 0.0


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Probability tensor over named axes.

    Input is renormalized exactly when its total is within ``1e-9`` of one;
    ``renormalized`` records whether that changed anything beyond float noise.
    """

    names: tuple[str, ...]
    mass: np.ndarray
    renormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != len(names):
            raise ShapeError(f"mass has {mass.ndim} axes but {len(names)} names were given")
        AlphabetSpec(names, mass.shape)
        drifted = _check_mass(mass, "pmf")
        flagged = self.renormalized
        if drifted:
            total = mass.sum()
            flagged = flagged or abs(total - 1.0) > 64 * np.finfo(float).eps * max(mass.size, 1)
            mass = mass / total
        mass.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "renormalized", bool(flagged))

    @property
    def alphabet(self) -> AlphabetSpec:
        return AlphabetSpec(self.names, self.mass.shape)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mass.shape

    def size(self, name: str) -> int:
        return self.mass.shape[self.axis(name)]

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AxisError(f"unknown axis {name!r}; have {self.names}") from None

    def axes(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.axis(n) for n in names)

    def transpose(self, order: Sequence[str]) -> "JointPmf":
        if sorted(order) != sorted(self.names):
            raise AxisError(f"{order} is not a permutation of {self.names}")
        return JointPmf(tuple(order), np.transpose(self.mass, self.axes(order)))

    def rename(self, mapping: dict[str, str]) -> "JointPmf":
        return JointPmf(tuple(mapping.get(n, n) for n in self.names), self.mass)

    def support(self) -> np.ndarray:
        """Flat indices of positive cells, in C order."""
        return np.flatnonzero(self.mass.ravel() > 0)

    @classmethod
    def uniform(cls, names: Sequence[str], sizes: Sequence[int]) -> "JointPmf":
        mass = np.full(tuple(sizes), 1.0 / math.prod(sizes))
        return cls(tuple(names), mass)

    @classmethod
    def product(cls, *factors: "JointPmf") -> "JointPmf":
        names: tuple[str, ...] = ()
        mass = np.ones(())
        for f in factors:
            names = names + f.names
            mass = np.multiply.outer(mass, f.mass)
        return cls(names, mass)

    def __repr__(self):
        return f"JointPmf(names={self.names}, shape={self.shape})"


@dataclass(frozen=True, eq=False)
class ConditionalPmf:
    """Kernel from ``inputs`` to ``outputs``.

    ``rows`` has shape ``input sizes + output sizes``; it sums to one over the
    output axes for every input cell.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        inputs, outputs = tuple(self.inputs), tuple(self.outputs)
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != len(inputs) + len(outputs):
            raise ShapeError("rows must have one axis per input and output")
        AlphabetSpec(inputs + outputs, rows.shape)
        if rows.size and rows.min() < 0:
            raise ValidationError("kernel has a negative entry")
        out_ax = tuple(range(len(inputs), rows.ndim))
        sums = rows.sum(axis=out_ax)
        if np.any(np.abs(sums - 1.0) > NORM_TOL):
            raise ValidationError("kernel rows must sum to 1 within 1e-9")
        rows = rows / np.expand_dims(sums, out_ax)
        rows.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "rows", rows)

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self.rows.shape[: len(self.inputs)]

    @property
    def output_shape(self) -> tuple[int, ...]:
        return self.rows.shape[len(self.inputs):]

    @classmethod
    def from_matrix(cls, inputs, input_shape, outputs, output_shape, matrix) -> "ConditionalPmf":
        """Build from a 2-D ``(input cells, output cells)`` row-stochastic matrix."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(tuple(inputs), tuple(outputs), matrix.reshape(tuple(input_shape) + tuple(output_shape)))

    @classmethod
    def deterministic(cls, inputs, input_shape, output, out_size, fn) -> "ConditionalPmf":
        rows = np.zeros(tuple(input_shape) + (out_size,))
        for idx in np.ndindex(*input_shape):
            rows[idx + (fn(*idx),)] = 1.0
        return cls(tuple(inputs), (output,), rows)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A map f: X x Y -> Z stored as an integer code matrix plus symbol labels."""

    cells: np.ndarray
    symbols: tuple = ()

    def __post_init__(self):
        cells = np.array(self.cells, dtype=int)
        if cells.ndim != 2 or 0 in cells.shape:
            raise ShapeError("function table must be a non-empty 2-D array")
        symbols = tuple(self.symbols) if self.symbols else tuple(range(int(cells.max()) + 1))
        if cells.min() < 0 or cells.max() >= len(symbols):
            raise ShapeError("cell codes fall outside the declared Z alphabet")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def from_symbols(cls, rows: Sequence[Sequence], alphabet: Sequence | None = None) -> "FunctionTable":
        flat = [s for row in rows for s in row]
        if alphabet is None:
            alphabet = list(dict.fromkeys(flat))
        lookup = {s: i for i, s in enumerate(alphabet)}
        try:
            codes = [[lookup[s] for s in row] for row in rows]
        except KeyError as exc:
            raise ShapeError(f"symbol {exc.args[0]!r} not in declared alphabet") from None
        if len({len(r) for r in rows}) != 1:
            raise ShapeError("ragged function table")
        return cls(np.array(codes), tuple(alphabet))

    @property
    def nx(self) -> int:
        return self.cells.shape[0]

    @property
    def ny(self) -> int:
        return self.cells.shape[1]

    @property
    def nz(self) -> int:
        return len(self.symbols)

    def __call__(self, x: int, y: int) -> int:
        return int(self.cells[x, y])

    def relabeled(self, perm: Sequence[int]) -> "FunctionTable":
        """Apply a permutation of Z codes (code c becomes perm[c])."""
        perm = np.asarray(perm)
        return FunctionTable(perm[self.cells], tuple(self.symbols[i] for i in np.argsort(perm)))

    # named tables used throughout
    @classmethod
    def xor(cls) -> "FunctionTable":
        return cls(np.array([[0, 1], [1, 0]]))

    @classmethod
    def and_(cls) -> "FunctionTable":
        return cls(np.array([[0, 0], [0, 1]]))

    @classmethod
    def or_(cls) -> "FunctionTable":
        return cls(np.array([[0, 1], [1, 1]]))

    @classmethod
    def sum_(cls) -> "FunctionTable":
        return cls(np.array([[0, 1], [1, 2]]))

    @classmethod
    def mod2_sum(cls, nx: int, ny: int) -> "FunctionTable":
        x, y = np.indices((nx, ny))
        return cls((x + y) % 2, (0, 1))

    @classmethod
    def constant(cls, nx: int, ny: int) -> "FunctionTable":
        return cls(np.zeros((nx, ny), dtype=int))


# --- measures -------------------------------------------------------------

def _names(axes) -> tuple[str, ...]:
    if isinstance(axes, str):
        return (axes,)
    return tuple(axes)


def _marginal_array(p: JointPmf, keep: Sequence[str]) -> np.ndarray:
    keep_ax = p.axes(keep)
    drop = tuple(i for i in range(len(p.names)) if i not in keep_ax)
    m = p.mass.sum(axis=drop)
    # reorder to the requested order
    remaining = [i for i in range(len(p.names)) if i in keep_ax]
    return np.transpose(m, [remaining.index(i) for i in keep_ax])


def _h(v: np.ndarray) -> float:
    v = v[v > 0]
    return float(-(v * np.log2(v)).sum())


def entropy(p: JointPmf, axes) -> float:
    """Shannon entropy in bits of the marginal of ``p`` on ``axes``."""
    axes = _names(axes)
    if len(set(axes)) != len(axes):
        raise AxisError(f"repeated axis in {axes}")
    if not axes:
        p.axes(())
        return 0.0
    return _h(_marginal_array(p, axes).ravel())


def conditional_mutual_information(p: JointPmf, a, b, c=()) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C); ``c`` may be empty."""
    a, b, c = _names(a), _names(b), _names(c)
    sa, sb, sc = set(a), set(b), set(c)
    if (sa & sb) or (sa & sc) or (sb & sc):
        raise AxisError(f"axis subsets must be disjoint: {a}, {b}, {c}")
    if not a or not b:
        raise AxisError("mutual information needs nonempty A and B")
    return entropy(p, a + c) + entropy(p, b + c) - entropy(p, a + b + c) - entropy(p, c)


def mutual_information(p: JointPmf, a, b) -> float:
    return conditional_mutual_information(p, a, b, ())


def marginalize(p: JointPmf, keep) -> JointPmf:
    keep = _names(keep)
    if not keep:
        raise AxisError("marginalize needs a nonempty keep set")
    if len(set(keep)) != len(keep):
        raise AxisError(f"repeated axis in {keep}")
    return JointPmf(keep, _marginal_array(p, keep))


def apply_function(p: JointPmf, f: FunctionTable, x: str = "X", y: str = "Y", z: str = "Z") -> JointPmf:
    """Extend ``p`` on (X, Y) with the deterministic column Z = f(X, Y)."""
    if set(p.names) != {x, y}:
        raise ShapeError(f"apply_function expects a law on ({x}, {y}), got {p.names}")
    pxy = p.transpose((x, y)).mass
    if pxy.shape != f.cells.shape:
        raise ShapeError(f"table shape {f.cells.shape} does not match law shape {pxy.shape}")
    mass = np.zeros(pxy.shape + (f.nz,))
    ix, iy = np.indices(pxy.shape)
    mass[ix, iy, f.cells] = pxy
    return JointPmf((x, y, z), mass)


def attach_channel(p: JointPmf, k: ConditionalPmf) -> JointPmf:
    """Joint law of ``p`` with the kernel outputs appended as new axes."""
    missing = [n for n in k.inputs if n not in p.names]
    if missing:
        raise ShapeError(f"kernel inputs {missing} are not axes of the law")
    clash = [n for n in k.outputs if n in p.names]
    if clash:
        raise ShapeError(f"kernel outputs {clash} already exist in the law")
    if tuple(p.size(n) for n in k.inputs) != k.input_shape:
        raise ShapeError("kernel input sizes do not match the law")
    # view rows on the full axis order: p axes then outputs
    order = [k.inputs.index(n) if n in k.inputs else None for n in p.names]
    rows = k.rows
    src = [i for i in order if i is not None]
    rows = np.moveaxis(rows, src, list(range(len(src)))) if src else rows
    shape = [p.size(n) if n in k.inputs else 1 for n in p.names] + list(k.output_shape)
    rows = rows.reshape(shape)
    mass = np.expand_dims(p.mass, tuple(range(p.mass.ndim, p.mass.ndim + len(k.outputs)))) * rows
    return JointPmf(p.names + k.outputs, mass)


def tensor_power(p: JointPmf, n: int, cap: int = DEFAULT_CELL_CAP) -> JointPmf:
    """Law of ``n`` i.i.d. copies; axis ``A`` of copy ``i`` is named ``A{i}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cells = p.mass.size ** n
    if cells > cap:
        raise CapacityError(f"tensor power would have {cells} cells (cap {cap})")
    if n == 1:
        return p
    mass = p.mass
    for _ in range(n - 1):
        mass = np.multiply.outer(mass, p.mass)
    names = tuple(f"{a}{i}" for i in range(1, n + 1) for a in p.names)
    return JointPmf(names, mass)


def covariance_sign(pxy: np.ndarray) -> float:
    """p00 p11 - p01 p10, whose sign is the sign of Cov(X, Y) for binary X, Y."""
    pxy = np.asarray(pxy)
    return float(pxy[0, 0] * pxy[1, 1] - pxy[0, 1] * pxy[1, 0])


def roles(p: JointPmf) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """Axis groups playing X, Y, Z: ``X`` itself or ``X1, X2, ...`` after a tensor power."""
    def group(letter):
        if letter in p.names:
            return (letter,)
        found = tuple(n for n in p.names if n[:1] == letter and n[1:].isdigit())
        return found

    x, y, z = group("X"), group("Y"), group("Z")
    if not x or not y:
        raise AxisError(f"law has no X/Y axes: {p.names}")
    return x, y, z


def is_deterministic(p: JointPmf, target: Sequence[str], given: Sequence[str], tol: float = 1e-12) -> bool:
    """True when H(target | given) is zero up to ``tol``."""
    return entropy(p, tuple(target) + tuple(given)) - entropy(p, given) <= tol
