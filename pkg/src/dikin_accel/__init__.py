"""Affine scaling LP solvers with momentum (GAFS) and Shanks acceleration (AAFS)."""

from .diagnostics import (
    KKTReport,
    PotentialReport,
    TraceRecord,
    kkt_report,
    lemma2_residual,
    potential_FN,
    vertex_oracle,
)
from .linalg import DualEstimate, cholesky_spd, dual_estimates, eap_direction
from .model import (
    GeneralLP,
    LinearProgram,
    Phase1Problem,
    RandomLpSpec,
    phase1,
    random_dense_lp,
    standardize,
)
from .mps import parse_mps
from .solver import (
    Algorithm,
    ShanksWindow,
    SolveOutcome,
    SolverConfig,
    Status,
    check_stop,
    shanks_apply,
    solve,
    step,
    update_z,
)

__all__ = [
    "Algorithm",
    "DualEstimate",
    "GeneralLP",
    "KKTReport",
    "LinearProgram",
    "Phase1Problem",
    "PotentialReport",
    "RandomLpSpec",
    "ShanksWindow",
    "SolveOutcome",
    "SolverConfig",
    "Status",
    "TraceRecord",
    "check_stop",
    "cholesky_spd",
    "dual_estimates",
    "eap_direction",
    "kkt_report",
    "lemma2_residual",
    "parse_mps",
    "phase1",
    "potential_FN",
    "random_dense_lp",
    "shanks_apply",
    "solve",
    "standardize",
    "step",
    "update_z",
    "vertex_oracle",
]
