"""Graph and boundary-problem data model.

All numeric quantities are :class:`fractions.Fraction` values; floats are
rejected at every entry point.  Vertices are dense integer ids ``0..n-1``
with optional display labels.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Scalar = Fraction

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


class ProblemError(ValueError):
    """Raised when a problem file or a problem object is not acceptable."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations) or [message]


def to_scalar(value) -> Fraction:
    """Convert an int, Fraction or ``"num/den"`` string to a Fraction.

    Floats and decimal strings are refused so that no binary rounding can
    enter the computation.
    """
    if isinstance(value, bool):
        raise ProblemError(f"not a rational value: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise ProblemError(f"zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise ProblemError(f"not a rational value: {value!r} (use 'num/den' or an integer)")


def format_scalar(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted adjacency tuples."""

    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.adjacency))))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] = ()):
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        return cls(tuple(tuple(sorted(s)) for s in nbrs), tuple(labels))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def neighbors(self, x: int) -> tuple[int, ...]:
        return self.adjacency[x]

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in self.adjacency[a] if a < b]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ProblemError(f"unknown vertex {label!r}") from None

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n

    def problems(self) -> list[str]:
        out = []
        for x, nb in enumerate(self.adjacency):
            if x in nb:
                out.append(f"self-loop at {self.labels[x]}")
            if len(set(nb)) != len(nb):
                out.append(f"duplicate edge at {self.labels[x]}")
            if list(nb) != sorted(nb):
                out.append(f"adjacency of {self.labels[x]} not sorted")
            for y in nb:
                if not 0 <= y < self.n:
                    out.append(f"neighbor id {y} out of range at {self.labels[x]}")
                elif x not in self.adjacency[y]:
                    out.append(f"asymmetric edge {self.labels[x]}-{self.labels[y]}")
        if len(set(self.labels)) != len(self.labels):
            out.append("duplicate vertex labels")
        if not self.is_connected():
            out.append("disconnected")
        return out


@dataclass(frozen=True)
class Bias:
    """Either one bias ``r`` for every interior vertex or a per-vertex map.

    ``r`` is the ratio q/p of Player II's to Player I's win probability.
    """

    r: Fraction | None = None
    per_vertex: Mapping[int, Fraction] | None = None

    @classmethod
    def uniform(cls, r) -> "Bias":
        return cls(r=to_scalar(r))

    @classmethod
    def varying(cls, mapping: Mapping[int, object]) -> "Bias":
        return cls(per_vertex={int(k): to_scalar(v) for k, v in mapping.items()})

    @property
    def is_uniform(self) -> bool:
        return self.per_vertex is None

    def at(self, x: int) -> Fraction:
        if self.per_vertex is None:
            return self.r
        return self.per_vertex[x]

    def p(self, x: int) -> Fraction:
        return 1 / (1 + self.at(x))

    def q(self, x: int) -> Fraction:
        r = self.at(x)
        return r / (1 + r)


@dataclass(frozen=True)
class BoundaryProblem:
    """Graph, boundary set, boundary values and bias.

    Construction does not validate; call :func:`validate` (``parse_problem``
    always does).
    """

    graph: Graph
    boundary_values: Mapping[int, Fraction]
    bias: Bias
    boundary: frozenset[int] = field(default=None)

    def __post_init__(self):
        if self.boundary is None:
            object.__setattr__(self, "boundary", frozenset(self.boundary_values))

    @property
    def interior(self) -> list[int]:
        return [x for x in range(self.graph.n) if x not in self.boundary]

    def p(self, x: int) -> Fraction:
        return self.bias.p(x)

    def q(self, x: int) -> Fraction:
        return self.bias.q(x)

    def with_bias(self, bias: Bias) -> "BoundaryProblem":
        return BoundaryProblem(self.graph, self.boundary_values, bias, self.boundary)

    def with_values(self, boundary_values: Mapping[int, Fraction]) -> "BoundaryProblem":
        return BoundaryProblem(self.graph, dict(boundary_values), self.bias, self.boundary)


def validate(problem: BoundaryProblem) -> list[str]:
    """Return every violated invariant; an empty list means the problem is ok."""
    out = problem.graph.problems()
    if not problem.boundary:
        out.append("empty boundary")
    if set(problem.boundary_values) != set(problem.boundary):
        out.append("boundary values not defined on exactly the boundary")
    for x, v in problem.boundary_values.items():
        if not isinstance(v, Fraction):
            out.append(f"boundary value at {x} is not exact")
    bias = problem.bias
    if bias.per_vertex is None:
        if not isinstance(bias.r, Fraction):
            out.append("bias r is not exact")
        elif bias.r <= 0:
            out.append("non-positive bias")
    else:
        interior = set(problem.interior)
        if set(bias.per_vertex) != interior:
            out.append("per-vertex bias must cover exactly the interior vertices")
        if any(not isinstance(v, Fraction) or v <= 0 for v in bias.per_vertex.values()):
            out.append("non-positive bias")
    return out


def _fail(message: str) -> None:
    raise ProblemError(message)


def problem_from_dict(doc: Mapping) -> BoundaryProblem:
    if not isinstance(doc, Mapping):
        _fail("problem document must be an object")
    for key in ("vertices", "edges", "boundary", "bias"):
        if key not in doc:
            _fail(f"missing field {key!r}")
    labels = [str(v) for v in doc["vertices"]]
    if len(set(labels)) != len(labels):
        _fail("duplicate vertex labels")
    ids = {lab: i for i, lab in enumerate(labels)}

    def vid(label) -> int:
        if str(label) not in ids:
            _fail(f"unknown vertex {label!r}")
        return ids[str(label)]

    edges: set[tuple[int, int]] = set()
    for pair in doc["edges"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            _fail(f"edge must be a pair of labels: {pair!r}")
        a, b = vid(pair[0]), vid(pair[1])
        if a == b:
            _fail(f"self-loop rejected: {labels[a]}")
        key = (min(a, b), max(a, b))
        if key in edges:
            _fail(f"duplicate edge {labels[a]}-{labels[b]}")
        edges.add(key)
    graph = Graph.from_edges(len(labels), sorted(edges), labels)

    values: dict[int, Fraction] = {}
    for entry in doc["boundary"]:
        if not isinstance(entry, Mapping) or "label" not in entry or "value" not in entry:
            _fail(f"boundary entry must be {{label, value}}: {entry!r}")
        x = vid(entry["label"])
        if x in values:
            _fail(f"duplicate boundary vertex {labels[x]}")
        values[x] = to_scalar(entry["value"])

    bias_doc = doc["bias"]
    if not isinstance(bias_doc, Mapping) or len(bias_doc) != 1 or not ({"r", "perVertex"} & set(bias_doc)):
        _fail('bias must be {"r": ...} or {"perVertex": {...}}')
    if "r" in bias_doc:
        bias = Bias.uniform(bias_doc["r"])
    else:
        bias = Bias.varying({vid(k): v for k, v in bias_doc["perVertex"].items()})

    problem = BoundaryProblem(graph, values, bias)
    violations = validate(problem)
    if violations:
        raise ProblemError("; ".join(violations), violations)
    return problem


def parse_problem(text: str) -> BoundaryProblem:
    """Parse a JSON problem document (see README for the grammar)."""
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return problem_from_dict(doc)


def _reject_float(token: str):
    raise ProblemError(f"floating-point literal {token} not allowed; write values as 'num/den'")


def problem_to_dict(problem: BoundaryProblem) -> dict:
    g = problem.graph
    if problem.bias.is_uniform:
        bias = {"r": format_scalar(problem.bias.r)}
    else:
        bias = {"perVertex": {g.labels[x]: format_scalar(v) for x, v in sorted(problem.bias.per_vertex.items())}}
    return {
        "vertices": list(g.labels),
        "edges": [[g.labels[a], g.labels[b]] for a, b in g.edges()],
        "boundary": [
            {"label": g.labels[x], "value": format_scalar(v)}
            for x, v in sorted(problem.boundary_values.items())
        ],
        "bias": bias,
    }


def dump_problem(problem: BoundaryProblem) -> str:
    doc = problem_to_dict(problem)
    rows = []
    for key in ("vertices", "edges", "boundary"):
        items = ",\n    ".join(json.dumps(item) for item in doc[key])
        rows.append(f'  "{key}": [\n    {items}\n  ]' if items else f'  "{key}": []')
    rows.append(f'  "bias": {json.dumps(doc["bias"])}')
    return "{\n" + ",\n".join(rows) + "\n}\n"


def make_problem(n: int, edges, boundary_values: Mapping[int, object], r=None, per_vertex=None,
                 labels: Sequence[str] = ()) -> BoundaryProblem:
    """Convenience constructor used by tests and fixtures; validates."""
    graph = Graph.from_edges(n, edges, labels)
    bias = Bias.uniform(r) if per_vertex is None else Bias.varying(per_vertex)
    problem = BoundaryProblem(graph, {int(k): to_scalar(v) for k, v in boundary_values.items()}, bias)
    violations = validate(problem)
    if violations:
        raise ProblemError("; ".join(violations), violations)
    return problem
