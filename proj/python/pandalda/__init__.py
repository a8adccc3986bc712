"""Pivotal high-dimensional linear discriminant analysis.

One-stage tuning-insensitive estimation of a sparse discriminant direction
(PANDA), the LPD and AdaLDA baselines, a proximal-ADMM second-order-cone
solver, synthetic population models, and evaluation metrics. The heavy
lifting lives in the compiled extension; this package re-exports it.
"""

from ._core import (
    AdmmConfig,
    GaussianModel,
    adalda_fit,
    auc,
    build_model,
    classify,
    empirical_error,
    grid_search,
    lpd_fit,
    panda_fit,
    population_risk,
    project_nonneg,
    project_soc,
    prox_l1,
    sample,
    std_normal_cdf,
    sym_sqrt,
    theoretical_defaults,
    variable_selection,
)

__all__ = [
    "AdmmConfig",
    "GaussianModel",
    "adalda_fit",
    "auc",
    "build_model",
    "classify",
    "empirical_error",
    "grid_search",
    "lpd_fit",
    "panda_fit",
    "population_risk",
    "project_nonneg",
    "project_soc",
    "prox_l1",
    "sample",
    "std_normal_cdf",
    "sym_sqrt",
    "theoretical_defaults",
    "variable_selection",
]

__version__ = "0.1.0"
