"""Explicit zero-energy solution families and their invariant checks."""

from nvlab.solutions.analysis import (
    BlowupResult,
    L2Growth,
    blowup_scan,
    l2_growth,
    l2_norm_squared,
    local_l2_estimate,
    mass,
    nonzero_root_ratio,
    nv_residual,
    radial_decay_slope,
)
from nvlab.solutions.families import (
    C0,
    FAMILIES,
    Q1ab,
    Q2c,
    Qn0,
    Scaled,
    Solution,
    create_solution,
    eval_solution,
    w_field,
)
from nvlab.solutions.gould_hopper import GHPoly, gh_eval, gh_identities_check, gh_poly

__all__ = [
    "C0",
    "FAMILIES",
    "BlowupResult",
    "GHPoly",
    "L2Growth",
    "Q1ab",
    "Q2c",
    "Qn0",
    "Scaled",
    "Solution",
    "blowup_scan",
    "create_solution",
    "eval_solution",
    "gh_eval",
    "gh_identities_check",
    "gh_poly",
    "l2_growth",
    "l2_norm_squared",
    "local_l2_estimate",
    "mass",
    "nonzero_root_ratio",
    "nv_residual",
    "radial_decay_slope",
    "w_field",
]
