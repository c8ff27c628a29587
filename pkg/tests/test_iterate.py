import random
from fractions import Fraction

import pytest

from biased_harmonic.core import make_problem
from biased_harmonic.figures import NONCONSTANT_ARROWS, NONCONSTANT_VALUES, nonconstant_bias_problem, path_problem
from biased_harmonic.harmonic import extract_directions
from biased_harmonic.iterate import (EnumerationCapError, InconsistentDirectionsError, SingularSystemError,
                                     brute_force_solve, consistent_choices, default_max_sweeps, hybrid_solve,
                                     reduce_two_values, solve_linear, solve_with_directions, sweep,
                                     value_iteration)
from biased_harmonic.solver import solve_exact

from generators import corpus, random_small_problem

F = Fraction


def by_label(problem, mapping):
    labels = problem.graph.labels
    return {labels.index(k): v for k, v in mapping.items()}


@pytest.fixture
def nonconstant():
    return nonconstant_bias_problem()


@pytest.fixture
def nonconstant_values(nonconstant):
    return {x: F(v) for x, v in by_label(nonconstant, NONCONSTANT_VALUES).items()}


@pytest.fixture
def nonconstant_arrows(nonconstant):
    labels = nonconstant.graph.labels
    return {labels.index(k): (labels.index(a), labels.index(b)) for k, (a, b) in NONCONSTANT_ARROWS.items()}


def test_solve_linear():
    A = [[2, 1], [1, 3]]
    assert solve_linear(A, [3, 5]) == [F(4, 5), F(7, 5)]
    with pytest.raises(SingularSystemError):
        solve_linear([[1, 2], [2, 4]], [1, 2])


@pytest.mark.parametrize("seed", range(10))
def test_solve_linear_random(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    A = [[F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
    b = [F(rng.randint(-5, 5)) for _ in range(n)]
    try:
        x = solve_linear(A, b)
    except SingularSystemError:
        return
    assert [sum(a * v for a, v in zip(row, x)) for row in A] == b


def test_value_iteration_one_sweep():
    result = value_iteration(path_problem(r=1))
    assert result.sweeps == 1
    assert result.lower[1] == result.upper[1] == F(1, 2)
    assert result.max_gap == 0 and result.converged


def test_value_iteration_nonconstant(nonconstant, nonconstant_values):
    result = value_iteration(nonconstant, F(1, 2**30))
    assert result.converged and result.max_gap <= F(1, 2**30)
    mid = result.midpoint()
    assert {x: round(v) for x, v in mid.items()} == nonconstant_values


def test_value_iteration_reports_non_convergence():
    problem = make_problem(4, [(0, 1), (1, 2), (2, 3)], {0: 0, 3: 1}, r=1)
    result = value_iteration(problem, 0, 10)
    assert not result.converged
    assert result.sweeps == 10
    assert result.lower[1] < F(1, 3) < result.upper[1]
    assert result.lower[2] < F(2, 3) < result.upper[2]


def test_default_sweep_budget():
    problem = path_problem(r=1)
    assert default_max_sweeps(problem, F(1, 2**40)) == 10 * 3 * (1 + 41)


def test_extract_directions_nonconstant(nonconstant, nonconstant_values, nonconstant_arrows):
    assert extract_directions(nonconstant, nonconstant_values) == nonconstant_arrows


def test_extract_directions_ties_and_path():
    problem = make_problem(4, [(0, 1), (1, 2), (1, 3)], {0: 1, 2: 1, 3: 1}, r=2)
    assert extract_directions(problem, {x: F(1) for x in range(4)}) == {1: (0, 0)}
    assert extract_directions(path_problem(r=2), {0: 0, 1: F(1, 3), 2: 1}) == {1: (2, 0)}


def test_solve_with_directions(nonconstant, nonconstant_values, nonconstant_arrows):
    assert solve_with_directions(nonconstant, nonconstant_arrows) == nonconstant_values
    assert solve_with_directions(path_problem(r=2), {1: (2, 0)}) == {0: 0, 1: F(1, 3), 2: 1}


def test_solve_with_swapped_directions(nonconstant, nonconstant_arrows):
    x = nonconstant.graph.index("x")
    swapped = dict(nonconstant_arrows)
    swapped[x] = nonconstant_arrows[x][::-1]
    with pytest.raises(InconsistentDirectionsError) as info:
        solve_with_directions(nonconstant, swapped)
    assert x in info.value.violated
    assert info.value.vertex == min(info.value.violated)


def test_solve_with_cyclic_directions_is_singular():
    problem = make_problem(3, [(0, 1), (1, 2)], {0: 0}, r=1)
    with pytest.raises(SingularSystemError):
        solve_with_directions(problem, {1: (2, 2), 2: (1, 1)})


def test_brute_force_examples(nonconstant, nonconstant_values):
    assert brute_force_solve(nonconstant) == nonconstant_values
    choices = consistent_choices(path_problem(r=2))
    assert len(choices) == 1
    assert choices[0][1][1] == F(1, 3)
    all_boundary = make_problem(2, [(0, 1)], {0: 3, 1: 4}, r=1)
    assert brute_force_solve(all_boundary) == {0: 3, 1: 4}


def test_brute_force_cap():
    with pytest.raises(EnumerationCapError):
        brute_force_solve(nonconstant_bias_problem(), cap=10)


def test_reduce_two_values_bias():
    problem = make_problem(3, [(0, 1), (1, 2)], {0: 3, 2: F(9, 2)}, r=1)
    reduced = reduce_two_values(problem, 0, 9)
    assert reduced.bias.at(0) == 2
    assert reduced.bias.at(2) == 1
    assert reduced.bias.at(1) == 1
    assert reduced.boundary_values == {3: 0, 4: 9, 5: 0, 6: 9}
    assert set(reduced.graph.adjacency[0]) == {1, 3, 4}
    with pytest.raises(ValueError):
        reduce_two_values(problem, 3, 9)


def test_reduce_nonconstant(nonconstant, nonconstant_values):
    reduced = reduce_two_values(nonconstant, -1, 10)
    values = hybrid_solve(reduced)
    assert {x: values[x] for x in range(nonconstant.graph.n)} == nonconstant_values
    result = value_iteration(reduced, F(1, 2**30))
    assert {x: round(result.midpoint()[x]) for x in range(nonconstant.graph.n)} == nonconstant_values


def test_fixed_point(nonconstant, nonconstant_values):
    assert sweep(nonconstant, nonconstant_values) == nonconstant_values


@pytest.mark.parametrize("problem", corpus(21, 25) + corpus(22, 25, per_vertex=True),
                         ids=lambda p: f"n{p.graph.n}")
def test_sandwich_and_round_trip(problem):
    exact = brute_force_solve(problem)
    if problem.bias.is_uniform:
        assert exact == solve_exact(problem).values
    assert hybrid_solve(problem) == exact
    result = value_iteration(problem, keep_history=True)
    assert result.converged
    prev = None
    for lower, upper in result.history:
        assert all(lower[x] <= exact[x] <= upper[x] for x in exact)
        if prev:
            assert all(prev[0][x] <= lower[x] and upper[x] <= prev[1][x] for x in exact)
        prev = lower, upper
    assert sweep(problem, exact) == exact
    assert_round_trip(problem, exact)


def assert_round_trip(problem, exact):
    try:
        assert solve_with_directions(problem, extract_directions(problem, exact)) == exact
    except SingularSystemError:
        # smallest-id tie-breaking can point tied vertices at each other
        assert any(len({exact[y] for y in problem.graph.adjacency[x]}) < problem.graph.degree(x)
                   for x in problem.interior)


@pytest.mark.parametrize("seed", range(12))
def test_reduction_soundness(seed):
    rng = random.Random(500 + seed)
    problem = random_small_problem(rng, max_interior=3, max_boundary=3, per_vertex=seed % 3 == 0)
    exact = brute_force_solve(problem)
    g = problem.boundary_values.values()
    for m, M in [(None, None), (min(g) - F(1, 3), max(g) + 5)]:
        reduced = reduce_two_values(problem, m, M)
        assert set(reduced.boundary_values.values()) <= {min(reduced.boundary_values.values()),
                                                          max(reduced.boundary_values.values())}
        values = hybrid_solve(reduced)
        assert {x: values[x] for x in range(problem.graph.n)} == exact
