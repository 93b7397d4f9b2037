"""Effective-spread constant for the Schaefer-Schwartz two-factor bond model.

The approximate bond-price formula for this model replaces the spread in one
coefficient of the pricing equation by a constant, defined through a nonlinear
equation involving the time average of the deterministic consol-rate path.
This package computes that constant two ways: by a perturbation expansion in
the initial spread's distance from equilibrium, with every coefficient in
closed form and to arbitrary order, and by an independent numerical oracle
(Runge-Kutta integration plus safeguarded root finding) used for validation.
"""

from .epsseries import (
    EpsPowerSeries,
    ShatExpansion,
    equation_residual_series,
    rhs1_printed,
    series_add,
    series_exp,
    series_mul,
    series_scale,
    solve_shat_series,
)
from .errors import (
    BracketingError,
    DegenerateRateError,
    NumericalFailure,
    SingularBracketError,
)
from .expseries import ExpPolySeries, ExpPolyTerm, combine
from .oracle import (
    OracleResult,
    abar_closed_s0_equals_muhat,
    compute_oracle,
    default_n_steps,
    integrate_ell,
    path_csv,
    solve_shat_numeric,
)
from .params import (
    Epsilon,
    InitialState,
    ModelParams,
    N_MAX,
    epsilon,
    load_config,
    mu_hat,
    spread_path,
)
from .perturbation import (
    EllExpansion,
    build_c0,
    build_expansion,
    coefficients_csv,
    eval_ell,
    eval_tau_lbar,
    next_c,
    tau_lbar_terms,
)

__version__ = "0.1.0"

__all__ = [
    "BracketingError",
    "DegenerateRateError",
    "EllExpansion",
    "Epsilon",
    "EpsPowerSeries",
    "ExpPolySeries",
    "ExpPolyTerm",
    "InitialState",
    "ModelParams",
    "N_MAX",
    "NumericalFailure",
    "OracleResult",
    "ShatExpansion",
    "SingularBracketError",
    "abar_closed_s0_equals_muhat",
    "build_c0",
    "build_expansion",
    "coefficients_csv",
    "combine",
    "compute_oracle",
    "default_n_steps",
    "epsilon",
    "equation_residual_series",
    "eval_ell",
    "eval_tau_lbar",
    "integrate_ell",
    "load_config",
    "mu_hat",
    "next_c",
    "path_csv",
    "rhs1_printed",
    "series_add",
    "series_exp",
    "series_mul",
    "series_scale",
    "solve_shat_numeric",
    "solve_shat_series",
    "spread_path",
    "tau_lbar_terms",
]
