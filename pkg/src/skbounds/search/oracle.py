"""Exhaustive minimisation over grid-quantised kernels, for validating the searches."""
from __future__ import annotations

import numpy as np

from ..envelope.core import CellFunctional
from ..envelope.grid import simplex_grid
from ..errors import CapacityError
from ..expr import I
from ..probkit import JointPmf, roles

ENUM_CAP = 10**8
_CHUNK = 100_000


def grid_oracle(p: JointPmf, j_card: int, k: int, cap: int = ENUM_CAP) -> float:
    """Minimum of ``I(X;Y|J) + I(X,Y;J|Z)`` over kernels whose rows lie on the ``1/k`` grid.

    Only rows for support cells of ``P`` matter, so those are enumerated.
    """
    x, y, z = roles(p)
    cells = p.support()
    rows = simplex_grid(j_card, k).atoms
    total = len(rows) ** len(cells)
    if total > cap:
        raise CapacityError(f"oracle would enumerate {total} kernels (cap {cap})")
    names = p.names + ("J",)
    shape = p.shape + (j_card,)
    full_cells = (cells[:, None] * j_card + np.arange(j_card)[None, :]).ravel()
    f = CellFunctional(I(x, y, "J") + I(x + y, "J", z), names, shape, full_cells)
    pm = p.mass.ravel()[cells]
    best = np.inf
    n_rows, n_cells = len(rows), len(cells)
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK))
        choice = np.stack(np.unravel_index(idx, (n_rows,) * n_cells), axis=1)
        masses = (rows[choice] * pm[None, :, None]).reshape(len(idx), -1)
        best = min(best, float(f(masses).min()))
    return best
