"""Random problem generators shared by the test modules."""

import random
from fractions import Fraction

from biased_harmonic.core import make_problem
from biased_harmonic.iterate import DEFAULT_CAP, choice_count

BIASES = (Fraction(1, 3), Fraction(1), Fraction(3))


def random_rational(rng, lo=-10, hi=10, den=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_connected_edges(rng, n, max_degree=4, extra=None):
    deg = [0] * n
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        v = order[i]
        choices = [u for u in order[:i] if deg[u] < max_degree]
        u = rng.choice(choices)
        edges.add((min(u, v), max(u, v)))
        deg[u] += 1
        deg[v] += 1
    if extra is None:
        extra = rng.randint(0, n)
    for _ in range(extra):
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        key = (min(a, b), max(a, b))
        if a != b and key not in edges and deg[a] < max_degree and deg[b] < max_degree:
            edges.add(key)
            deg[a] += 1
            deg[b] += 1
    return sorted(edges)


def random_small_problem(rng, max_interior=6, max_boundary=3, max_degree=4, biases=BIASES,
                         cap=DEFAULT_CAP, per_vertex=False):
    """Connected problem small enough for brute-force enumeration."""
    while True:
        k = rng.randint(1, max_interior)
        b = rng.randint(1, max_boundary)
        n = k + b
        edges = random_connected_edges(rng, n, max_degree)
        boundary = rng.sample(range(n), b)
        values = {x: random_rational(rng) for x in boundary}
        if per_vertex:
            bias = {x: rng.choice(biases) for x in range(n) if x not in values}
            problem = make_problem(n, edges, values, per_vertex=bias)
        else:
            problem = make_problem(n, edges, values, r=rng.choice(biases))
        if choice_count(problem) <= cap:
            return problem


def corpus(seed, size, **kwargs):
    rng = random.Random(seed)
    return [random_small_problem(rng, **kwargs) for _ in range(size)]


def random_large_problem(rng, n, r, boundary_fraction=0.1):
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    while len(edges) < 2 * n - 1:
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    boundary = rng.sample(range(n), max(1, round(n * boundary_fraction)))
    return make_problem(n, sorted(edges), {x: rng.randint(0, 100) for x in boundary}, r=r)
