"""Uniform rational grids on the probability simplex."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from ..errors import CapacityError

ATOM_CAP = 5_000_000


@dataclass(frozen=True)
class SimplexGrid:
    """All points of the ``d``-cell simplex with coordinates in ``{0, 1/k, ..., 1}``.

    ``counts`` holds the integer numerators; atoms are ``counts / k``.  Rows
    are in ascending lexicographic order of ``counts``.
    """

    d: int
    k: int
    counts: np.ndarray

    @property
    def atoms(self) -> np.ndarray:
        return self.counts / self.k

    @property
    def h(self) -> float:
        return 1.0 / self.k

    def __len__(self):
        return len(self.counts)

    def vertex_indices(self) -> np.ndarray:
        """Row index of each unit vector ``e_i``."""
        return np.flatnonzero(self.counts.max(axis=1) == self.k)[::-1] if self.d > 1 else np.array([0])


def grid_size(d: int, k: int) -> int:
    return comb(k + d - 1, d - 1)


@lru_cache(maxsize=64)
def _compositions(d: int, k: int) -> np.ndarray:
    if d == 1:
        return np.array([[k]], dtype=np.int32)
    blocks = []
    for a in range(k + 1):
        rest = _compositions(d - 1, k - a)
        blocks.append(np.hstack([np.full((len(rest), 1), a, dtype=np.int32), rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def simplex_grid(d: int, k: int, cap: int = ATOM_CAP) -> SimplexGrid:
    if d < 1 or k < 1:
        raise ValueError(f"need d >= 1 and k >= 1, got d={d}, k={k}")
    n = grid_size(d, k)
    if n > cap:
        raise CapacityError(f"simplex grid d={d}, k={k} has {n} atoms (cap {cap})")
    return SimplexGrid(d, k, _compositions(d, k))
