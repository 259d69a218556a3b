"""growlab: random walk on growing multigraphs, measured end to end.

Simulates time-inhomogeneous simple random walk and the evolving-set process
on monotone graph sequences, computes exact transition probabilities and
isoperimetric profiles on finite snapshots, evaluates transition-probability
upper bounds and transience/recurrence diagnostics, and reproduces an
inhomogeneous birth-death chain whose two endpoint laws are designed to merge
slowly.
"""

from ._core import BACKEND
from .graph import GraphSnapshot, GrowingGraphSequence, relative_boundary, validate_monotone
from .families import (
    expander_family,
    frozen_nested_family,
    growing_path_family,
    lattice_ball_family,
    merging_schedule,
    path_snapshot,
    two_vertex_frozen,
)
from .isoperimetry import analytic_profile, calibrate_cd, cheeger_constant, \
    exact_profile, profile_provider
from .walk import evolve_exact, evolve_exact_rational, hitting_time_tail, \
    on_diag_lower_check, return_stats_exact, return_stats_mc, simulate, \
    simulate_paths, step_kernel
from .evoset import evolving_step, run_plain, run_size_biased
from .bounds import (
    BoundParams,
    first_bound,
    frozen_recurrence_experiment,
    iterate_L,
    lower_bound_check,
    second_bound,
    transience_report,
    zd_phase,
)
from .merging import certify_constraints, excursion_tail, merging_distances, \
    merging_time_tv, two_state_analysis

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundParams", "GraphSnapshot", "GrowingGraphSequence",
    "analytic_profile", "calibrate_cd", "certify_constraints",
    "cheeger_constant", "evolve_exact", "evolve_exact_rational",
    "evolving_step", "exact_profile", "excursion_tail", "expander_family",
    "first_bound", "frozen_nested_family", "frozen_recurrence_experiment",
    "growing_path_family", "hitting_time_tail", "iterate_L",
    "lattice_ball_family", "lower_bound_check", "merging_distances",
    "merging_schedule", "merging_time_tv", "on_diag_lower_check",
    "path_snapshot", "profile_provider", "relative_boundary",
    "return_stats_exact", "return_stats_mc", "run_plain", "run_size_biased",
    "second_bound", "simulate", "simulate_paths", "step_kernel",
    "transience_report", "two_state_analysis", "two_vertex_frozen",
    "validate_monotone", "zd_phase",
]
