"""Spectral solver and estimate experiments for the coupled Schrodinger-Kawahara system

    i u_t + u_xx = alpha u v + beta |u|^2 u
    v_t + gamma v_xxx - delta v_xxxxx + v v_x = epsilon (|u|^2)_x

on a periodic interval.
"""

from .dynamics import (
    ConservedSet,
    CoupledState,
    Diagnostics,
    SolverConfig,
    conservation_derivative_check,
    conserved_quantities,
    etdrk4_step,
    integrate,
    kawahara_integrate,
    nonlinear_rhs,
)
from .errors import (
    BlowupDetected,
    ConfigError,
    FormatError,
    InsufficientData,
    InvalidGrid,
    ResolutionWarning,
    ShapeError,
    SKError,
    SpaceMismatch,
    UnsupportedRule,
)
from .globalization import IntervalReport, QuadState, growth_fit, run_globalization
from .io import RunConfig, make_initial_condition, parse_config, read_snapshot, write_diagnostics_csv, write_snapshot
from .propagators import PhysParams, dispersion_p, kawahara_propagate, schrodinger_propagate
from .scaling import dilate_state, dilated_coefficients, dilated_residual
from .spectral import Grid, make_grid

__version__ = "0.1.0"

__all__ = [
    "BlowupDetected",
    "ConfigError",
    "ConservedSet",
    "CoupledState",
    "Diagnostics",
    "FormatError",
    "Grid",
    "InsufficientData",
    "IntervalReport",
    "InvalidGrid",
    "PhysParams",
    "QuadState",
    "ResolutionWarning",
    "RunConfig",
    "SKError",
    "ShapeError",
    "SolverConfig",
    "SpaceMismatch",
    "UnsupportedRule",
    "conservation_derivative_check",
    "conserved_quantities",
    "dilate_state",
    "dilated_coefficients",
    "dilated_residual",
    "dispersion_p",
    "etdrk4_step",
    "growth_fit",
    "integrate",
    "kawahara_integrate",
    "kawahara_propagate",
    "make_grid",
    "make_initial_condition",
    "nonlinear_rhs",
    "parse_config",
    "read_snapshot",
    "run_globalization",
    "schrodinger_propagate",
    "write_diagnostics_csv",
    "write_snapshot",
]
