"""Biased infinity-harmonic extension of boundary data on finite graphs."""

__version__ = "0.1.0"

from .core import Bias, BoundaryProblem, Graph, ProblemError, make_problem, parse_problem, validate
from .harmonic import extract_directions, harmonic_residual
from .iterate import brute_force_solve, hybrid_solve, reduce_two_values, solve_with_directions, value_iteration
from .slope import geom_sum, path_fill, r_slope
from .solver import Solution, solve_exact
