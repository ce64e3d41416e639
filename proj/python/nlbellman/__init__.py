"""Nonlocal Bellman operators: evaluation, Dirichlet solves and control sets."""

from ._nlbellman import (
    Error,
    EvaluationError,
    InvalidArgument,
    MonotonicityError,
    control_set,
    decay_fit,
    eigenpair_ball,
    evaluate,
    fractional_laplacian_constant,
    half_space_kernel_mass,
    normalize_problem,
    reflection_mass,
    schrodinger_threshold,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "EvaluationError",
    "InvalidArgument",
    "MonotonicityError",
    "control_set",
    "decay_fit",
    "eigenpair_ball",
    "evaluate",
    "fractional_laplacian_constant",
    "half_space_kernel_mass",
    "normalize_problem",
    "reflection_mass",
    "schrodinger_threshold",
    "solve",
]
