"""Parallel dynamic programming through lattice-linear predicate detection."""

from .engine import (
    NonTerminationError,
    PredicateSpec,
    ScheduleConfig,
    SolveReport,
    SpecError,
    StateVector,
    solve,
    solve_async,
    solve_priority,
    solve_rounds,
    solve_sequential,
)

__all__ = [
    "NonTerminationError",
    "PredicateSpec",
    "ScheduleConfig",
    "SolveReport",
    "SpecError",
    "StateVector",
    "solve",
    "solve_async",
    "solve_priority",
    "solve_rounds",
    "solve_sequential",
]
