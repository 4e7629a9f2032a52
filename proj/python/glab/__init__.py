"""Goldstein stationarity toolkit."""

from ._glab import (
    BisectStalled,
    BumpFunction1D,
    CallableOracle,
    Circuit,
    CircuitOracle,
    ContractError,
    ConvexHardInstance,
    Error,
    MinNormStalled,
    Oracle,
    ParseError,
    QuadOracle,
    ResistingFunction,
    RotatedOracle,
    ZeroRespectViolation,
    absval_circuit,
    bump1d,
    convex_hard_min_dim,
    emit_circuit,
    estimate_goldstein_min_norm,
    lipschitz,
    min_norm_point,
    oracle_call_bound,
    parse_circuit,
    rotate,
    run_adversarial,
    simulate_convex_lb,
    smooth,
    smoothness_exponent,
    softmax,
    solve,
)

__version__ = "0.1.0"
