"""Kernel searches, the grid oracle and gradient checks."""
from .config import SearchConfig
from .delta import psi_delta_evaluate, psi_delta_sweep
from .engine import ExprObjective, KernelModel, KernelSpec, PenaltyObjective, minimize
from .oracle import grid_oracle
from .problems import (
    interactive_lower_bound,
    intrinsic_information,
    kernel_from_witness,
    psi_hat_search,
    ribbon_margin,
    sow_evaluate,
)

__all__ = [
    "ExprObjective", "KernelModel", "KernelSpec", "PenaltyObjective", "SearchConfig", "grid_oracle",
    "interactive_lower_bound", "intrinsic_information", "kernel_from_witness", "minimize",
    "psi_delta_evaluate", "psi_delta_sweep", "psi_hat_search", "ribbon_margin", "sow_evaluate",
]
