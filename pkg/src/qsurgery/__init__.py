"""Gauge-fixed lattice surgery for CSS codes."""

from .gf2 import BitMatrix, BitVector
from .code import (
    BBCodeSpec,
    CssCode,
    InducedGraph,
    LogicalBasis,
    NotLogicalError,
    PauliOperator,
    bb_code,
    gross_code,
    gross_operators,
    hgp,
    hgp_logical_basis,
    induced_graph,
    is_irreducible,
    load_check_matrix,
    logical_basis,
    num_logicals,
    reduce_weight,
    save_check_matrix,
    validate,
)
from .surgery import (
    BridgeSpec,
    CapExceededError,
    MergedCode,
    ReducibleOperatorError,
    boundary_cheeger,
    build_x_system,
    build_xx_system,
    build_y_system,
    build_z_system,
    cellulate,
    gauge_basis,
    load_merged,
    min_layers,
    prune_redundant_gauge_checks,
    save_merged,
    solve_bridge_weights,
)

__all__ = [
    "BBCodeSpec",
    "BitMatrix",
    "BitVector",
    "BridgeSpec",
    "CapExceededError",
    "CssCode",
    "InducedGraph",
    "LogicalBasis",
    "MergedCode",
    "NotLogicalError",
    "PauliOperator",
    "ReducibleOperatorError",
    "bb_code",
    "boundary_cheeger",
    "build_x_system",
    "build_xx_system",
    "build_y_system",
    "build_z_system",
    "cellulate",
    "gauge_basis",
    "gross_code",
    "gross_operators",
    "hgp",
    "hgp_logical_basis",
    "induced_graph",
    "is_irreducible",
    "load_check_matrix",
    "load_merged",
    "logical_basis",
    "min_layers",
    "num_logicals",
    "prune_redundant_gauge_checks",
    "reduce_weight",
    "save_check_matrix",
    "save_merged",
    "solve_bridge_weights",
    "validate",
]
