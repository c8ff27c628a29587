"""Approximate and enumerative solvers that also handle per-vertex bias.

* :func:`value_iteration` runs the monotone sweep from below and from above.
* :func:`solve_with_directions` fixes every player's move and solves the
  resulting linear system exactly.
* :func:`brute_force_solve` tries every choice of moves.
* :func:`hybrid_solve` lets value iteration settle most moves and enumerates
  only the undecided vertices.
* :func:`reduce_two_values` rewrites a problem so that only two boundary
  values occur.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from .core import Bias, BoundaryProblem, Graph, ProblemError, to_scalar, validate
from .harmonic import Directions, extract_directions

DEFAULT_TOLERANCE = Fraction(1, 2**40)
DEFAULT_CAP = 10**6


class SingularSystemError(ArithmeticError):
    pass


class InconsistentDirectionsError(ValueError):
    """The solved values contradict the prescribed moves.

    ``vertex`` is the first offending interior vertex and ``violated`` lists
    all of them in increasing order.
    """

    def __init__(self, vertex: int, values: Mapping[int, Fraction], violated: tuple[int, ...] = ()):
        super().__init__(f"directions inconsistent at vertex {vertex}")
        self.vertex = vertex
        self.values = values
        self.violated = violated or (vertex,)


class EnumerationCapError(RuntimeError):
    pass


def solve_linear(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination with partial pivoting on |entry|.

    ``A`` and ``b`` are copied, not modified.
    """
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(rhs)] for row, rhs in zip(A, b)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda i: abs(M[i][col]))
        if M[pivot][col] == 0:
            raise SingularSystemError("singular linear system")
        M[col], M[pivot] = M[pivot], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        for i in range(col + 1, n):
            factor = M[i][col] * inv
            if factor:
                row = M[i]
                for j in range(col, n + 1):
                    row[j] -= factor * prow[j]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = M[i]
        s = row[n] - sum(row[j] * x[j] for j in range(i + 1, n))
        x[i] = s / row[i]
    return x


# ---------------------------------------------------------------- iteration

@dataclass
class IterationResult:
    lower: dict[int, Fraction]
    upper: dict[int, Fraction]
    sweeps: int
    max_gap: Fraction
    converged: bool
    history: list[tuple[dict[int, Fraction], dict[int, Fraction]]] = field(default_factory=list, repr=False)

    def midpoint(self) -> dict[int, Fraction]:
        return {x: (self.lower[x] + self.upper[x]) / 2 for x in self.lower}


def sweep(problem: BoundaryProblem, u: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """One synchronous update: every interior value from the previous ones."""
    adjacency = problem.graph.adjacency
    out = dict(u)
    for x in problem.interior:
        nb = [u[y] for y in adjacency[x]]
        out[x] = problem.p(x) * max(nb) + problem.q(x) * min(nb)
    return out


def default_max_sweeps(problem: BoundaryProblem, tolerance: Fraction) -> int:
    g = problem.boundary_values.values()
    spread = max(g) - min(g)
    bits = 0
    if spread > 0:
        bits = math.ceil(spread / tolerance).bit_length() if tolerance > 0 else 64
    return 10 * problem.graph.n * (1 + bits)


def _initial(problem: BoundaryProblem, level: Fraction) -> dict[int, Fraction]:
    u = {x: level for x in range(problem.graph.n)}
    u.update(problem.boundary_values)
    return u


def iterates(problem: BoundaryProblem) -> Iterator[tuple[dict[int, Fraction], dict[int, Fraction]]]:
    """Yield (lower, upper) forever, starting with the initial pair."""
    g = problem.boundary_values.values()
    lower, upper = _initial(problem, min(g)), _initial(problem, max(g))
    while True:
        yield lower, upper
        lower, upper = sweep(problem, lower), sweep(problem, upper)


def _gap(lower, upper) -> Fraction:
    return max((upper[x] - lower[x] for x in lower), default=Fraction(0))


def value_iteration(problem: BoundaryProblem, tolerance=DEFAULT_TOLERANCE, max_sweeps: int | None = None,
                    keep_history: bool = False) -> IterationResult:
    """Sweep from below (start at min g) and from above (start at max g).

    Stops once the largest gap is at most ``tolerance`` or after
    ``max_sweeps`` sweeps.  Values stay exact; the lower iterate only grows
    and the upper one only shrinks.
    """
    tolerance = to_scalar(tolerance)
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    if max_sweeps is None:
        max_sweeps = default_max_sweeps(problem, tolerance)
    history = []
    for count, (lower, upper) in enumerate(iterates(problem)):
        if keep_history:
            history.append((lower, upper))
        gap = _gap(lower, upper)
        if gap <= tolerance or count >= max_sweeps:
            return IterationResult(lower, upper, count, gap, gap <= tolerance, history)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------- directions

def solve_with_directions(problem: BoundaryProblem, directions: Mapping[int, tuple[int, int]]) -> dict[int, Fraction]:
    """Solve u(x) = p_x u(max move) + q_x u(min move) and check the moves.

    Raises :class:`SingularSystemError` if the moves do not determine the
    values and :class:`InconsistentDirectionsError` if the solution does not
    put the maximum (minimum) at the prescribed neighbor.
    """
    interior = problem.interior
    col = {x: i for i, x in enumerate(interior)}
    g = problem.boundary_values
    k = len(interior)
    A = [[Fraction(0)] * k for _ in range(k)]
    b = [Fraction(0)] * k
    for i, x in enumerate(interior):
        if x not in directions:
            raise KeyError(f"no directions for vertex {x}")
        A[i][i] += 1
        for y, w in zip(directions[x], (problem.p(x), problem.q(x))):
            if y not in problem.graph.adjacency[x]:
                raise ValueError(f"{y} is not a neighbor of {x}")
            if y in col:
                A[i][col[y]] -= w
            else:
                b[i] += w * g[y]
    u = dict(g)
    u.update(zip(interior, solve_linear(A, b)))
    violated = []
    for x in interior:
        nb = [u[y] for y in problem.graph.adjacency[x]]
        hi, lo = directions[x]
        if u[hi] != max(nb) or u[lo] != min(nb):
            violated.append(x)
    if violated:
        raise InconsistentDirectionsError(violated[0], u, tuple(violated))
    return u


def direction_options(problem: BoundaryProblem, x: int) -> list[tuple[int, int]]:
    nb = problem.graph.adjacency[x]
    if len(nb) == 1:
        return [(nb[0], nb[0])]
    return [(a, b) for a in nb for b in nb if a != b]


def choice_count(problem: BoundaryProblem) -> int:
    return math.prod(len(direction_options(problem, x)) for x in problem.interior)


def _screen(problem: BoundaryProblem, options, chunk: int = 50_000):
    """Indices of choices that look consistent in floating point.

    Every exactly consistent, nonsingular choice passes the screen; the
    survivors are re-solved exactly by the caller.
    """
    interior = problem.interior
    n = problem.graph.n
    k = len(interior)
    col = {x: i for i, x in enumerate(interior)}
    g = np.zeros(n)
    for x, v in problem.boundary_values.items():
        g[x] = float(v)
    scale = 1.0 + float(np.abs(g).max())
    tol = 1e-7 * scale
    bases = [len(o) for o in options]
    strides = np.cumprod([1] + bases[:-1])
    total = math.prod(bases)
    is_inner = np.array([t in col for t in range(n)])
    col_of = np.array([col.get(t, 0) for t in range(n)])
    per_vertex = []
    for i, x in enumerate(interior):
        hi = np.array([a for a, _ in options[i]])
        lo = np.array([b for _, b in options[i]])
        per_vertex.append((hi, lo, float(problem.p(x)), float(problem.q(x)), np.array(problem.graph.adjacency[x])))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        K = len(idx)
        A = np.broadcast_to(np.eye(k), (K, k, k)).copy()
        rhs = np.zeros((K, k))
        picks = []
        for i, (hi, lo, p, q, _) in enumerate(per_vertex):
            digit = (idx // strides[i]) % bases[i]
            h, l = hi[digit], lo[digit]
            picks.append((h, l))
            for target, w in ((h, p), (l, q)):
                inside = is_inner[target]
                rows = np.nonzero(inside)[0]
                np.subtract.at(A, (rows, i, col_of[target][inside]), w)
                rhs[~inside, i] += w * g[target[~inside]]
        ok = np.abs(np.linalg.det(A)) > 1e-9
        if not ok.any():
            continue
        sol = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
        U = np.broadcast_to(g, (len(sol), n)).copy()
        U[:, interior] = sol
        good = np.ones(len(sol), dtype=bool)
        for i, (_, _, _, _, nb) in enumerate(per_vertex):
            h, l = picks[i][0][ok], picks[i][1][ok]
            vals = U[:, nb]
            rows = np.arange(len(sol))
            good &= U[rows, h] >= vals.max(axis=1) - tol
            good &= U[rows, l] <= vals.min(axis=1) + tol
        for j in idx[ok][good]:
            yield int(j)


def consistent_choices(problem: BoundaryProblem, cap: int = DEFAULT_CAP) -> list[tuple[Directions, dict[int, Fraction]]]:
    """Every nonsingular choice of moves whose exact solution is consistent."""
    interior = problem.interior
    if not interior:
        return [({}, dict(problem.boundary_values))]
    options = [direction_options(problem, x) for x in interior]
    total = math.prod(len(o) for o in options)
    if total > cap:
        raise EnumerationCapError(f"{total} direction choices exceed the cap of {cap}")
    bases = [len(o) for o in options]
    found = []
    for j in _screen(problem, options):
        directions = {}
        for i, x in enumerate(interior):
            directions[x] = options[i][j % bases[i]]
            j //= bases[i]
        try:
            found.append((directions, solve_with_directions(problem, directions)))
        except (SingularSystemError, InconsistentDirectionsError):
            pass
    return found


def brute_force_solve(problem: BoundaryProblem, cap: int = DEFAULT_CAP) -> dict[int, Fraction]:
    """Solution by trying every choice of moves; checks that all agree."""
    violations = validate(problem)
    if violations:
        raise ProblemError("; ".join(violations), violations)
    found = consistent_choices(problem, cap)
    if not found:
        raise RuntimeError("no consistent choice of directions found")
    values = found[0][1]
    for _, other in found[1:]:
        if other != values:
            raise AssertionError("two consistent direction choices give different values")
    return values


def _candidates(problem: BoundaryProblem, lower, upper, x: int) -> list[tuple[int, int]]:
    nb = problem.graph.adjacency[x]
    if len(nb) == 1:
        return [(nb[0], nb[0])]
    floor_of_max = max(lower[y] for y in nb)
    ceil_of_min = min(upper[y] for y in nb)
    highs = [y for y in nb if upper[y] >= floor_of_max]
    lows = [y for y in nb if lower[y] <= ceil_of_min]
    return [(a, b) for a in highs for b in lows if a != b]


def hybrid_solve(problem: BoundaryProblem, tolerance=DEFAULT_TOLERANCE, max_sweeps: int | None = None,
                 max_ambiguous: int = 20, eager_product: int = 16, cap: int = DEFAULT_CAP) -> dict[int, Fraction]:
    """Exact solution for any bias: iterate, then enumerate undecided moves.

    After each sweep the bracketing iterates rule out neighbors that cannot
    be the maximum or minimum.  Once few combinations remain they are solved
    exactly; the first consistent one is the solution.
    """
    violations = validate(problem)
    if violations:
        raise ProblemError("; ".join(violations), violations)
    tolerance = to_scalar(tolerance)
    if max_sweeps is None:
        max_sweeps = default_max_sweeps(problem, tolerance)
    interior = problem.interior
    if not interior:
        return dict(problem.boundary_values)
    for count, (lower, upper) in enumerate(iterates(problem)):
        last = _gap(lower, upper) <= tolerance or count >= max_sweeps
        options = [_candidates(problem, lower, upper, x) for x in interior]
        total = math.prod(len(o) for o in options)
        if total <= eager_product or last:
            ambiguous = sum(len(o) > 1 for o in options)
            if ambiguous > max_ambiguous or total > cap:
                raise EnumerationCapError(f"{ambiguous} undecided vertices, {total} combinations")
            for combo in itertools.product(*options):
                try:
                    return solve_with_directions(problem, dict(zip(interior, combo)))
                except (SingularSystemError, InconsistentDirectionsError):
                    continue
            if last:
                raise RuntimeError("no consistent choice among the undecided directions")


def solve(problem: BoundaryProblem) -> dict[int, Fraction]:
    """Exact values for any bias, using the fastest applicable method."""
    if problem.bias.is_uniform:
        from .solver import solve_exact
        return solve_exact(problem).values
    return hybrid_solve(problem)


# ---------------------------------------------------------------- reduction

def reduce_two_values(problem: BoundaryProblem, m=None, M=None) -> BoundaryProblem:
    """Equivalent problem whose boundary values are only ``m`` and ``M``.

    Each old boundary vertex x gets pendants valued m and M and becomes
    interior with bias (M - g(x)) / (g(x) - m).  The original vertices keep
    their ids; pendants are appended in boundary order (m first).
    """
    g = problem.boundary_values
    m = min(g.values()) - 1 if m is None else to_scalar(m)
    M = max(g.values()) + 1 if M is None else to_scalar(M)
    if not all(m < v < M for v in g.values()):
        raise ValueError("m and M must lie strictly below and above every boundary value")
    graph = problem.graph
    n = graph.n
    labels = list(graph.labels)
    edges = graph.edges()
    values = {}
    bias = {x: problem.bias.at(x) for x in problem.interior}
    for x in sorted(problem.boundary):
        lo, hi = len(labels), len(labels) + 1
        labels += [f"{graph.labels[x]}~min", f"{graph.labels[x]}~max"]
        edges += [(x, lo), (x, hi)]
        values[lo], values[hi] = m, M
        bias[x] = (M - g[x]) / (g[x] - m)
    assert len(labels) == n + 2 * len(problem.boundary)
    new_graph = Graph.from_edges(len(labels), edges, labels)
    return BoundaryProblem(new_graph, values, Bias(per_vertex=bias))
