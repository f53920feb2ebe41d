"""Simplex grids, a dense LP solver and lower convex envelopes."""
from .core import CellFunctional, EnvelopeResult, dual_gap, lower_convex_envelope
from .grid import ATOM_CAP, SimplexGrid, grid_size, simplex_grid
from .lp import LinearProgram, LPResult, lp_minimize
from .psi import DEFAULT_LADDER, delta_bar, delta_envelope, lower_hull_1d, psi_hat_envelope, psi_hat_objective

__all__ = [
    "ATOM_CAP", "CellFunctional", "DEFAULT_LADDER", "EnvelopeResult", "LPResult", "LinearProgram",
    "SimplexGrid", "delta_bar", "delta_envelope", "dual_gap", "grid_size", "lower_convex_envelope",
    "lower_hull_1d", "lp_minimize", "psi_hat_envelope", "psi_hat_objective", "simplex_grid",
]
