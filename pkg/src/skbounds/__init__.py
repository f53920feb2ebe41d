"""Finite-alphabet bounds on secret-key capacity.

The one-shot upper bound ``min_J I(X;Y|J) + I(X,Y;J|Z)`` via lower convex
envelopes and search, closed-form witnesses for binary sources, the
function-table classifier, the residual envelope for ``Z = X xor Y`` and
executable checks of the identities and inequalities behind them.
"""
from .errors import (
    AxisError,
    CapacityError,
    DegenerateCaseError,
    InfeasibleError,
    ParseError,
    PreconditionError,
    RenormalizationWarning,
    ShapeError,
    SKBoundsError,
    UnboundedError,
    ValidationError,
)
from .probkit import (
    ConditionalPmf,
    FunctionTable,
    JointPmf,
    apply_function,
    attach_channel,
    conditional_mutual_information,
    entropy,
    marginalize,
    mutual_information,
    tensor_power,
)
from .results import BoundReport, DecompositionWitness
from .envelope import delta_bar, delta_envelope, psi_hat_envelope
from .search import (
    SearchConfig,
    interactive_lower_bound,
    intrinsic_information,
    psi_delta_evaluate,
    psi_hat_search,
    ribbon_margin,
    sow_evaluate,
)
from .constructions import hull_membership, monotone_split, ternary_witness, verify_witness, xor_witness
from .tables import classify_table, enumerate_tables, falsify_invalid

__version__ = "0.1.0"
