"""Numerical verification lab for blow-up in weakly coupled complex
Ginzburg-Landau systems: exact ODE machinery with explicit lifespan bounds,
pseudospectral torus and finite-difference Euclidean simulators with
weighted-mean growth checks, and power-law rate extraction."""

from . import euclid, torus
from .errors import DomainError, IntegrationError, ValidationError
from .ode_core import (
    BoundReport,
    ComparisonVerdict,
    CoupledODESpec,
    SingleODESpec,
    Trajectory,
    check_comparison,
    conserved_residual,
    conserved_residual_scaled,
    damped_bounds,
    integrate_coupled,
    mirrored_spec,
    single_blowup_solution,
    single_blowup_time,
    tail_corrected_lifespan,
    undamped_bounds,
)
from .ratefit import RateFit, fit_power_law, trailing_decade_window
from .system import FunctionalSeries, OdiReport, SystemParams
from .testfn import TestFunctionData, build_test_function, verify_phi_inequality

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ComparisonVerdict",
    "CoupledODESpec",
    "DomainError",
    "FunctionalSeries",
    "IntegrationError",
    "OdiReport",
    "RateFit",
    "SingleODESpec",
    "SystemParams",
    "TestFunctionData",
    "Trajectory",
    "ValidationError",
    "__version__",
    "build_test_function",
    "check_comparison",
    "conserved_residual",
    "conserved_residual_scaled",
    "damped_bounds",
    "euclid",
    "fit_power_law",
    "integrate_coupled",
    "mirrored_spec",
    "single_blowup_solution",
    "single_blowup_time",
    "tail_corrected_lifespan",
    "torus",
    "trailing_decade_window",
    "undamped_bounds",
    "verify_phi_inequality",
]
