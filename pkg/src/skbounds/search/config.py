"""Search configuration."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by every kernel search.

    Cardinalities left as ``None`` fall back to each problem's default
    (``|J| = |X||Y|`` for the one-shot bound, ``|U| = |V| = |X|`` for the
    one-way rate, and so on).
    """

    restarts: int = 6
    max_iter: int = 1500
    step: float = 1.0
    step_up: float = 1.2
    step_down: float = 0.5
    tol: float = 1e-11
    patience: int = 25
    seed: int = 0
    j_card: int | None = None
    u_card: int | None = None
    v_card: int | None = None
    smoothing: float = 1e-6
    penalty_rounds: int = 5
    penalty_start: float = 10.0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        for name in ("j_card", "u_card", "v_card"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")

    def with_(self, **kw) -> "SearchConfig":
        return replace(self, **kw)

    def rngs(self) -> list[np.random.Generator]:
        """One independent generator per restart, derived from ``seed``."""
        seqs = np.random.SeedSequence(self.seed).spawn(self.restarts)
        return [np.random.default_rng(s) for s in seqs]
