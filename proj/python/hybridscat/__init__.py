"""Hybrid volumetric / boundary-integral Helmholtz scattering solver."""

from ._core import (
    ConfigError,
    HybridSolver,
    Incidence,
    MieReference,
    ProblemConfig,
    RefractivityModel,
    SolveResult,
    epsilon_inf,
    green_identity_error,
    parse_wavenumber,
    pi,
    run,
    validate,
)

__all__ = [
    "ConfigError",
    "HybridSolver",
    "Incidence",
    "MieReference",
    "ProblemConfig",
    "RefractivityModel",
    "SolveResult",
    "epsilon_inf",
    "green_identity_error",
    "parse_wavenumber",
    "pi",
    "run",
    "validate",
]
