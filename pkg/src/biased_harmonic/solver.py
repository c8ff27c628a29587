"""Exact solver for constant bias: grow the valued set along steepest paths.

Starting from the boundary, repeatedly pick the connecting path with the
largest r-slope, value its interior by the harmonic fill of a path, and add
it to the valued set.  When no connecting path is left, every remaining
vertex hangs off a single valued anchor and copies the anchor's value.

Ties between equally steep candidates are broken by shorter length, then by
the smaller ``(start, end)`` pair, then by the lexicographically smallest
interior vertex sequence.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import BoundaryProblem, Graph, ProblemError, validate
from .harmonic import Directions, extract_directions, harmonic_residual
from .slope import PathSlope, path_fill, r_slope


class SolverInvariantError(AssertionError):
    """A property that the algorithm guarantees did not hold."""


Edge = tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PartialExtension:
    used_vertices: frozenset[int]
    used_edges: frozenset[Edge]
    values: Mapping[int, Fraction]

    @classmethod
    def initial(cls, problem: BoundaryProblem) -> "PartialExtension":
        return cls(frozenset(problem.boundary), frozenset(), dict(problem.boundary_values))


@dataclass(frozen=True)
class ConnectingPath:
    vertices: tuple[int, ...]
    slope: PathSlope

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    def edges(self) -> list[Edge]:
        return [edge_key(a, b) for a, b in zip(self.vertices, self.vertices[1:])]


@dataclass
class Solution:
    values: dict[int, Fraction]
    strategy: Directions
    trace: list[ConnectingPath] = field(default_factory=list)
    basin_fills: dict[int, int] = field(default_factory=dict)


def _fresh_bfs(adjacency, source: int, in_star: Sequence[bool]):
    """BFS from ``source`` through unvalued vertices only.

    Returns the distances to the unvalued vertices reached and, for every
    other valued vertex reachable that way, the length of the shortest path
    whose interior is entirely unvalued (always >= 2).
    """
    fresh: dict[int, int] = {}
    targets: dict[int, int] = {}
    queue = deque()
    for y in adjacency[source]:
        if not in_star[y]:
            fresh[y] = 1
            queue.append(y)
    while queue:
        u = queue.popleft()
        d = fresh[u] + 1
        for w in adjacency[u]:
            if in_star[w]:
                if w != source and w not in targets:
                    targets[w] = d
            elif w not in fresh:
                fresh[w] = d
                queue.append(w)
    return fresh, targets


def _lex_smallest_path(adjacency, a: int, b: int, length: int, in_star: Sequence[bool]) -> tuple[int, ...]:
    if length == 1:
        return (a, b)
    to_b, _ = _fresh_bfs(adjacency, b, in_star)
    path = [a]
    cur = a
    for remaining in range(length - 1, 0, -1):
        cur = next(y for y in adjacency[cur] if not in_star[y] and to_b.get(y) == remaining)
        path.append(cur)
    path.append(b)
    return tuple(path)


def _candidate_key(slope: Fraction, length: int, a: int, b: int):
    return (-slope, length, a, b)


def max_slope_connecting_path(problem: BoundaryProblem, partial: PartialExtension) -> ConnectingPath | None:
    """Steepest connecting path for ``partial`` by exhaustive pair search.

    Every ordered pair of valued vertices is scored in both orientations;
    the solver's incremental search must agree with this function.
    """
    r = problem.bias.r
    adjacency = problem.graph.adjacency
    in_star = [x in partial.used_vertices for x in range(problem.graph.n)]
    g = partial.values
    best = None
    for a in sorted(partial.used_vertices):
        _, targets = _fresh_bfs(adjacency, a, in_star)
        for b in adjacency[a]:
            if in_star[b] and edge_key(a, b) not in partial.used_edges:
                targets[b] = 1
        for b, n in targets.items():
            key = _candidate_key(r_slope(g[a], g[b], n, r), n, a, b)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    _, n, a, b = best
    vertices = _lex_smallest_path(adjacency, a, b, n, in_star)
    return ConnectingPath(vertices, PathSlope.of(g[a], g[b], n, r))


def _check_path(partial: PartialExtension, path: ConnectingPath, graph: Graph | None) -> None:
    vs = path.vertices
    if len(vs) < 2 or vs[0] == vs[-1]:
        raise ValueError("connecting path needs two distinct endpoints")
    if vs[0] not in partial.used_vertices or vs[-1] not in partial.used_vertices:
        raise ValueError("connecting path endpoints must already be valued")
    inner = vs[1:-1]
    if len(set(inner)) != len(inner) or any(x in partial.used_vertices for x in inner):
        raise ValueError("connecting path interior must be distinct unvalued vertices")
    for e in path.edges():
        if e in partial.used_edges:
            raise ValueError(f"edge {e} already used")
        if graph is not None and e[1] not in graph.adjacency[e[0]]:
            raise ValueError(f"{e} is not an edge of the graph")


def extend_partial(partial: PartialExtension, path: ConnectingPath, r, graph: Graph | None = None) -> PartialExtension:
    """Add ``path`` to the partial extension, valuing its interior."""
    _check_path(partial, path, graph)
    lo, hi = partial.values[path.start], partial.values[path.end]
    if lo > hi:
        raise ValueError("connecting path must run in the increasing direction")
    values = dict(partial.values)
    values.update(zip(path.interior, path_fill(lo, hi, path.length, r)))
    return PartialExtension(
        partial.used_vertices | set(path.interior),
        partial.used_edges | set(path.edges()),
        values,
    )


def fill_isolated(problem: BoundaryProblem, partial: PartialExtension) -> tuple[dict[int, Fraction], dict[int, int]]:
    """Value each unvalued vertex by the single valued vertex it hangs from.

    Returns the new values and the anchor of every filled vertex.  Each
    component of unvalued vertices must touch exactly one valued vertex;
    otherwise a connecting path would still exist.
    """
    adjacency = problem.graph.adjacency
    used = partial.used_vertices
    values: dict[int, Fraction] = {}
    anchors: dict[int, int] = {}
    for start in range(problem.graph.n):
        if start in used or start in anchors:
            continue
        component = [start]
        seen = {start}
        touching = set()
        for u in component:
            for w in adjacency[u]:
                if w in used:
                    touching.add(w)
                elif w not in seen:
                    seen.add(w)
                    component.append(w)
        if len(touching) != 1:
            raise SolverInvariantError(
                f"unvalued component containing {start} touches {len(touching)} valued vertices"
            )
        (anchor,) = touching
        for u in component:
            anchors[u] = anchor
            values[u] = partial.values[anchor]
    return values, anchors


class _SteepestSearch:
    """Incremental steepest-path search used by :func:`solve_exact`.

    Candidate pairs live in a heap keyed by (-slope, length, start, end).
    Shortest connecting-path lengths can only grow as vertices and edges get
    used, and for increasing-direction pairs a longer path never has a
    larger slope, so a stored key is never better than the current one:
    popping, rescoring and re-pushing stale entries yields the exact
    maximum.
    """

    def __init__(self, problem: BoundaryProblem):
        self.problem = problem
        self.r = problem.bias.r
        self.adjacency = problem.graph.adjacency
        self.neighbor_sets = [set(nb) for nb in self.adjacency]
        n = problem.graph.n
        self.in_star = [False] * n
        for x in problem.boundary:
            self.in_star[x] = True
        self.values: dict[int, Fraction] = dict(problem.boundary_values)
        self.used_edges: set[Edge] = set()
        self.version = 0
        self._targets: dict[int, tuple[int, dict[int, int]]] = {}
        self.heap: list = []
        for a in sorted(problem.boundary):
            self._push_all_from(a, skip=lambda b, a=a: b < a)

    def targets(self, a: int) -> dict[int, int]:
        cached = self._targets.get(a)
        if cached is None or cached[0] != self.version:
            cached = (self.version, _fresh_bfs(self.adjacency, a, self.in_star)[1])
            self._targets[a] = cached
        return cached[1]

    def length(self, a: int, b: int) -> int | None:
        if b in self.neighbor_sets[a] and edge_key(a, b) not in self.used_edges:
            return 1
        return self.targets(a).get(b)

    def push(self, a: int, b: int, n: int) -> None:
        ga, gb = self.values[a], self.values[b]
        if ga > gb or (ga == gb and a > b):
            a, b, ga, gb = b, a, gb, ga
        heapq.heappush(self.heap, _candidate_key(r_slope(ga, gb, n, self.r), n, a, b))

    def _push_all_from(self, a: int, skip) -> None:
        found = dict(self.targets(a))
        for b in self.adjacency[a]:
            if self.in_star[b] and edge_key(a, b) not in self.used_edges:
                found[b] = 1
        for b, n in found.items():
            if not skip(b):
                self.push(a, b, n)

    def pop_steepest(self) -> ConnectingPath | None:
        while self.heap:
            neg_slope, n, a, b = heapq.heappop(self.heap)
            current = self.length(a, b)
            if current is None:
                continue
            if current != n:
                self.push(a, b, current)
                continue
            vertices = _lex_smallest_path(self.adjacency, a, b, n, self.in_star)
            return ConnectingPath(vertices, PathSlope(-neg_slope, n, self.values[a], self.values[b]))
        return None

    def add(self, path: ConnectingPath) -> None:
        new = path.interior
        self.values.update(zip(new, path_fill(path.slope.start_value, path.slope.end_value, path.length, self.r)))
        self.used_edges.update(path.edges())
        for x in new:
            self.in_star[x] = True
        if new:
            self.version += 1
        fresh = set(new)
        for x in new:
            self._push_all_from(x, skip=lambda b, x=x: b in fresh and b < x)
        again = self.length(path.start, path.end)
        if again is not None:
            self.push(path.start, path.end, again)

    def partial(self) -> PartialExtension:
        used = frozenset(x for x, flag in enumerate(self.in_star) if flag)
        return PartialExtension(used, frozenset(self.used_edges), dict(self.values))


def solve_exact(problem: BoundaryProblem, check: bool = True) -> Solution:
    """Unique solution of the boundary problem for a constant bias.

    With ``check`` (the default) the result is verified before returning:
    zero residual everywhere, boundary values kept, nonincreasing trace
    slopes.
    """
    violations = validate(problem)
    if violations:
        raise ProblemError("; ".join(violations), violations)
    if not problem.bias.is_uniform:
        raise ProblemError(
            "per-vertex bias is not handled by the steepest-path solver; "
            "use iterate.hybrid_solve or iterate.brute_force_solve"
        )
    search = _SteepestSearch(problem)
    edge_count = len(problem.graph.edges())
    trace: list[ConnectingPath] = []
    while True:
        path = search.pop_steepest()
        if path is None:
            break
        trace.append(path)
        search.add(path)
        if len(trace) > edge_count:
            raise SolverInvariantError("more extensions than edges")

    values = dict(search.values)
    basins: dict[int, int] = {}
    if len(values) < problem.graph.n:
        filled, basins = fill_isolated(problem, search.partial())
        values.update(filled)

    solution = Solution(values, extract_directions(problem, values), trace, basins)
    if check:
        check_solution(problem, solution)
    return solution


def check_solution(problem: BoundaryProblem, solution: Solution) -> None:
    for x, g in problem.boundary_values.items():
        if solution.values[x] != g:
            raise SolverInvariantError(f"boundary value changed at {x}")
    bad = {x: v for x, v in harmonic_residual(problem, solution.values).items() if v}
    if bad:
        raise SolverInvariantError(f"nonzero residual at {sorted(bad)}")
    slopes = [p.slope.value for p in solution.trace]
    if any(s < t for s, t in zip(slopes, slopes[1:])):
        raise SolverInvariantError("trace slopes increase")
