"""The biased infinity Laplacian and the greedy move rule it induces."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .core import BoundaryProblem

# interior vertex -> (neighbor Player I moves to, neighbor Player II moves to)
Directions = dict[int, tuple[int, int]]


def harmonic_residual(problem: BoundaryProblem, values: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """p_x * max_y u(y) + q_x * min_y u(y) - u(x) at every interior vertex."""
    adjacency = problem.graph.adjacency
    missing = [x for x in range(problem.graph.n) if x not in values]
    if missing:
        raise KeyError(f"no value at vertices {missing}")
    out = {}
    for x in problem.interior:
        nb = [values[y] for y in adjacency[x]]
        out[x] = problem.p(x) * max(nb) + problem.q(x) * min(nb) - values[x]
    return out


def is_harmonic(problem: BoundaryProblem, values: Mapping[int, Fraction]) -> bool:
    if any(values[x] != g for x, g in problem.boundary_values.items()):
        return False
    return not any(harmonic_residual(problem, values).values())


def extract_directions(problem: BoundaryProblem, values: Mapping[int, Fraction]) -> Directions:
    """Argmax and argmin neighbor of every interior vertex, ties to the smallest id."""
    adjacency = problem.graph.adjacency
    out = {}
    for x in problem.interior:
        nb = adjacency[x]
        hi = max(values[y] for y in nb)
        lo = min(values[y] for y in nb)
        out[x] = (next(y for y in nb if values[y] == hi), next(y for y in nb if values[y] == lo))
    return out
