"""Exact linear algebra over Q and prime fields."""
from .backend import BACKEND
from .core import Echelon, kernel_from_echelon, rank_rows, rref_rows
from .matrix import (
    ExactMatrix,
    SolveOutcome,
    complement_basis,
    complement_in_field,
    rank_and_kernel,
    solve_left_factor,
    solve_pairs,
)

__all__ = [
    "BACKEND",
    "Echelon",
    "ExactMatrix",
    "SolveOutcome",
    "complement_basis",
    "complement_in_field",
    "kernel_from_echelon",
    "rank_and_kernel",
    "rank_rows",
    "rref_rows",
    "solve_left_factor",
    "solve_pairs",
]
