"""Bounds and approximations for the principal eigenvalue of the weighted one-dimensional p-Laplacian."""

from ._core import (
    BoundsReport,
    ConfigError,
    ExactValue,
    FamilyOptimum,
    IterationError,
    IterationState,
    Problem,
    ShootResult,
    SweepRow,
    UpperSequence,
    bar_delta1,
    basic_bounds,
    certify,
    compute_bounds,
    delta1,
    delta1_prime,
    exact_bar_delta1,
    exact_lambda,
    exact_sigma,
    exact_values,
    iterate_lower,
    iterate_upper,
    sigma_p,
    solve_eigenvalue,
    sweep,
    to_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
