"""Feller-type boundary tests for stochastic Volterra equations."""

from ._core import (
    DomainError,
    KernelSpec,
    ModelSpec,
    NumericError,
    PreconditionError,
    ScaleContext,
    ValidationError,
    boundary_limit,
    bounded_interval_test,
    default_eps_shift,
    family_test,
    fractional_condition_study,
    fractional_gauss_rule,
    geometric_kernel,
    necessary_test,
    quadrature_kernel,
    scale,
    scale_derivative,
    simulate,
    solve_resolvent,
    sufficient_test,
    sup_inf_test,
    truncation_kernel,
    u_series,
    v,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
