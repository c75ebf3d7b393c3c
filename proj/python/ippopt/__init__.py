"""Inexact proximal point solvers for zeroth-order global optimization."""

from ._core import (
    BudgetExhausted,
    ConfigError,
    Objective,
    benchmark_names,
    default_params,
    hopf_lax,
    make_objective,
    minimize,
    prox_mc,
    random_shift,
)

__all__ = [
    "BudgetExhausted",
    "ConfigError",
    "Objective",
    "benchmark_names",
    "default_params",
    "hopf_lax",
    "make_objective",
    "minimize",
    "prox_mc",
    "random_shift",
]
