"""Longest obtuse-turn trajectories through planar point sets.

A trajectory visits distinct points and may only turn by an angle in
(pi/2, pi] at each interior vertex. The package provides the exact
predicate, exact and heuristic solvers, the monotone-chain lower-bound
construction and the nested-ring configurations that cap trajectory length.
"""

from .configuration import (Configuration, ConfigMeta, find_scale_factor, generate_collinear,
                            generate_grid, generate_nested_rings, generate_random,
                            load_configuration, save_configuration, verify_nesting_property)
from .experiments import bounds, run_suite
from .geometry import AnglePolicy, Point, RationalRotation, turn_admissible
from .monotone import es_trajectory, longest_monotone_subsequence
from .solver import (Budget, SolveReport, Status, Trajectory, beam_longest, brute_force_longest,
                     exact_longest, validate_trajectory)

__all__ = [
    "AnglePolicy", "Budget", "ConfigMeta", "Configuration", "Point", "RationalRotation",
    "SolveReport", "Status", "Trajectory", "beam_longest", "bounds", "brute_force_longest",
    "es_trajectory", "exact_longest", "find_scale_factor", "generate_collinear", "generate_grid",
    "generate_nested_rings", "generate_random", "load_configuration", "longest_monotone_subsequence",
    "run_suite", "save_configuration", "turn_admissible", "validate_trajectory",
    "verify_nesting_property",
]
