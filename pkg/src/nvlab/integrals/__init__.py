"""Dispersive oscillatory integrals over the frequency plane."""

from nvlab.integrals.decay import (
    DecayProbe,
    beta_sweep,
    fit_decay,
    profile_sensitivity,
    scaling_identity_check,
    small_time_fit,
    worst_case_u_grid,
)
from nvlab.integrals.registry import (
    REGIONS,
    create_region,
    eval_I_full,
    eval_I_inside,
    eval_I_outside,
    eval_I_R,
    evaluate,
)
from nvlab.integrals.spec import IntegralSpec, IntegralValue, RegionKind

__all__ = [
    "DecayProbe",
    "IntegralSpec",
    "IntegralValue",
    "REGIONS",
    "RegionKind",
    "beta_sweep",
    "create_region",
    "eval_I_R",
    "eval_I_full",
    "eval_I_inside",
    "eval_I_outside",
    "evaluate",
    "fit_decay",
    "profile_sensitivity",
    "scaling_identity_check",
    "small_time_fit",
    "worst_case_u_grid",
]
