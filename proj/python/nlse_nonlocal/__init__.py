"""Nonlocal NLSE solvers: free-space potentials, ground states and dynamics."""

from ._core import (
    ConfigError,
    ConvergenceError,
    Grid,
    __version__,
    error_eh,
    evolve,
    exact_potential,
    gaussian_density,
    ground_state,
    reproduce_table,
    solve_potential,
    table_ids,
    table_title,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "Grid",
    "__version__",
    "error_eh",
    "evolve",
    "exact_potential",
    "gaussian_density",
    "ground_state",
    "reproduce_table",
    "solve_potential",
    "table_ids",
    "table_title",
]
