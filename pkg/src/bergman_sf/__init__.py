"""Bergman-space norms and pair energies of simple partial fractions with poles on the unit circle."""
from .errors import DomainError, InsufficientDataError, InvariantFailure, NonConvergenceError
from .interaction import (
    SpaceParams,
    TruncatedCosineSeries,
    ValueWithError,
    build_series,
    phi_prime,
    phi_quadrature,
    phi_second_derivative,
    phi_series,
)
from .norms import (
    CircleConfig,
    config_energy_interaction,
    config_norm_sq_powersum,
    psi_norm_sq,
)
from .optimize import OptimizationResult, npoint_minimize, two_point_minimize

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InsufficientDataError",
    "InvariantFailure",
    "NonConvergenceError",
    "SpaceParams",
    "TruncatedCosineSeries",
    "ValueWithError",
    "build_series",
    "phi_series",
    "phi_quadrature",
    "phi_prime",
    "phi_second_derivative",
    "CircleConfig",
    "psi_norm_sq",
    "config_norm_sq_powersum",
    "config_energy_interaction",
    "OptimizationResult",
    "two_point_minimize",
    "npoint_minimize",
]
