"""Result containers shared across modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .probkit import JointPmf

CERTIFICATE_KINDS = ("closed-form", "envelope", "search-best", "oracle")


@dataclass(frozen=True)
class DecompositionWitness:
    """Mixture ``P = sum_j w_j Q_j`` with named construction parameters.

    ``kind`` is ``"T"`` for a witness of the form ``I(T;Z) = I(X;Y|T) = 0``
    and ``"J"`` for a split fed into the min over ``J``.
    """

    weights: np.ndarray
    components: tuple[JointPmf, ...]
    kind: str = "J"
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.components):
            raise ValueError("one weight per component required")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def names(self) -> tuple[str, ...]:
        return self.components[0].names

    def barycenter(self) -> np.ndarray:
        return np.tensordot(self.weights, np.stack([q.mass for q in self.components]), axes=1)

    def joint(self, label: str = "J") -> JointPmf:
        """Law of (J, *axes) with ``P(J=j) = w_j`` and ``P(.|J=j) = Q_j``."""
        stack = np.stack([q.mass for q in self.components])
        mass = self.weights.reshape((-1,) + (1,) * (stack.ndim - 1)) * stack
        return JointPmf((label,) + self.names, mass / mass.sum())

    def __len__(self):
        return len(self.components)


@dataclass
class BoundReport:
    """A bound value in bits with how it was obtained.

    ``residuals`` maps constraint names to nonnegative violations; ``trace``
    holds per-restart or per-resolution values; ``notes`` carries caveats.
    """

    quantity: str
    value: float
    certificate: str
    witness: Any = None
    residuals: dict[str, float] = field(default_factory=dict)
    trace: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.certificate not in CERTIFICATE_KINDS:
            raise ValueError(f"unknown certificate kind {self.certificate!r}")
        self.value = float(self.value)
        self.residuals = {k: abs(float(v)) for k, v in self.residuals.items()}

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)
