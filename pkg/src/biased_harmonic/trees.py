"""Boundary problems on trees.

A tree problem splits into independent pieces whose boundary is exactly
their leaf set: non-boundary leaves copy their only neighbor and can be
dropped, and boundary vertices of degree two or more cut the tree apart.
On such a piece a leaf-to-leaf path exists along which the solution is the
harmonic fill of the path, for any bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import Bias, BoundaryProblem, Graph, ProblemError
from .harmonic import harmonic_residual


def is_tree(graph: Graph) -> bool:
    return graph.n > 0 and len(graph.edges()) == graph.n - 1 and graph.is_connected()


@dataclass(frozen=True)
class TreePart:
    problem: BoundaryProblem
    original: tuple[int, ...]  # part vertex id -> original vertex id


@dataclass
class TreeReduction:
    parts: list[TreePart]
    # removed non-boundary leaf -> vertex whose value it takes
    copies: dict[int, int] = field(default_factory=dict)
    removal_order: list[int] = field(default_factory=list)

    @property
    def problems(self) -> list[BoundaryProblem]:
        return [part.problem for part in self.parts]

    def assemble(self, part_values: list[Mapping[int, Fraction]]) -> dict[int, Fraction]:
        """Combine per-part solutions into values on the original tree."""
        out: dict[int, Fraction] = {}
        for part, values in zip(self.parts, part_values):
            for i, x in enumerate(part.original):
                if x in out and out[x] != values[i]:
                    raise ValueError(f"parts disagree at vertex {x}")
                out[x] = values[i]
        for x in reversed(self.removal_order):
            out[x] = out[self.copies[x]]
        return out


def normalize_tree(problem: BoundaryProblem) -> TreeReduction:
    graph = problem.graph
    if not is_tree(graph):
        raise ProblemError("graph is not a tree")
    boundary = problem.boundary
    alive = set(range(graph.n))
    degree = [graph.degree(x) for x in range(graph.n)]
    copies: dict[int, int] = {}
    order: list[int] = []
    stack = [x for x in range(graph.n) if degree[x] == 1 and x not in boundary]
    while stack:
        x = stack.pop()
        if x not in alive or degree[x] != 1 or x in boundary:
            continue
        (y,) = [z for z in graph.adjacency[x] if z in alive]
        alive.discard(x)
        copies[x] = y
        order.append(x)
        degree[y] -= 1
        if degree[y] == 1 and y not in boundary:
            stack.append(y)

    edges = [(a, b) for a, b in graph.edges() if a in alive and b in alive]
    if not edges:
        (only,) = alive
        return TreeReduction([_make_part(problem, [only], [])], copies, order)

    # union edges that share a non-boundary vertex
    parent = list(range(len(edges)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    seen: dict[int, int] = {}
    for i, (a, b) in enumerate(edges):
        for v in (a, b):
            if v in boundary:
                continue
            if v in seen:
                parent[find(i)] = find(seen[v])
            else:
                seen[v] = i
    groups: dict[int, list[tuple[int, int]]] = {}
    for i, e in enumerate(edges):
        groups.setdefault(find(i), []).append(e)
    parts = []
    for group in sorted(groups.values()):
        vertices = sorted({v for e in group for v in e})
        parts.append(_make_part(problem, vertices, group))
    return TreeReduction(parts, copies, order)


def _make_part(problem: BoundaryProblem, vertices: list[int], edges) -> TreePart:
    local = {x: i for i, x in enumerate(vertices)}
    graph = Graph.from_edges(len(vertices), [(local[a], local[b]) for a, b in edges],
                             [problem.graph.labels[x] for x in vertices])
    values = {local[x]: problem.boundary_values[x] for x in vertices if x in problem.boundary}
    inner = [x for x in vertices if x not in problem.boundary]
    if problem.bias.is_uniform:
        bias = problem.bias
    else:
        bias = Bias(per_vertex={local[x]: problem.bias.at(x) for x in inner})
    return TreePart(BoundaryProblem(graph, values, bias), tuple(vertices))


def tree_harmonic_connection(problem: BoundaryProblem, values: Mapping[int, Fraction]) -> list[int]:
    """Leaf-to-leaf path along which every inner vertex sees its extreme neighbors.

    Starting from the whole tree, at each inner vertex of degree three or
    more keep only the branches through its minimal and maximal neighbor.
    What remains is a path.  It is returned running from lower to higher
    value.
    """
    graph = problem.graph
    if not is_tree(graph):
        raise ProblemError("graph is not a tree")
    leaves = {x for x in range(graph.n) if graph.degree(x) == 1}
    if graph.n > 1 and leaves != set(problem.boundary):
        raise ProblemError("boundary must be exactly the set of leaves")
    if any(harmonic_residual(problem, values).values()):
        raise ProblemError("values do not solve the problem")
    if graph.n == 1:
        return [0]

    adjacency = graph.adjacency
    kept = set(range(graph.n))

    def extremes(x):
        nb = adjacency[x]
        lo = min(nb, key=lambda y: (values[y], y))
        hi = max((y for y in nb if y != lo), key=lambda y: (values[y], -y))
        return lo, hi

    def branch(root, avoid):
        out, stack = {root}, [root]
        while stack:
            u = stack.pop()
            for w in adjacency[u]:
                if w != avoid and w in kept and w not in out:
                    out.add(w)
                    stack.append(w)
        return out

    while True:
        wide = [x for x in sorted(kept) if sum(y in kept for y in adjacency[x]) >= 3]
        if not wide:
            break
        x = wide[0]
        lo, hi = extremes(x)
        keep = {x} | branch(lo, x) | branch(hi, x)
        kept &= keep

    ends = [x for x in kept if sum(y in kept for y in adjacency[x]) == 1]
    start = min(ends, key=lambda y: (values[y], y))
    path = [start]
    prev = None
    while True:
        nxt = [y for y in adjacency[path[-1]] if y in kept and y != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])

    for a, x, b in zip(path, path[1:], path[2:]):
        nb = [values[y] for y in adjacency[x]]
        lo, hi = min(nb), max(nb)
        if (values[a], values[b]) not in ((lo, hi), (hi, lo)):
            raise AssertionError(f"path vertex {x} is not flanked by its extreme neighbors")
    return path
