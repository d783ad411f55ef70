"""Adaptive FEM with separate marking for data approximation."""

from ._safem import (
    LevelError,
    Mesh,
    SolverError,
    approx,
    doerfler_select,
    l_shape,
    oscillation,
    read_mesh,
    run,
    solve_ls,
    solve_mixed,
    unit_square,
)

__all__ = [
    "LevelError",
    "Mesh",
    "SolverError",
    "approx",
    "doerfler_select",
    "l_shape",
    "oscillation",
    "read_mesh",
    "run",
    "solve_ls",
    "solve_mixed",
    "unit_square",
]
