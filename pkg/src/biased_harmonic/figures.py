"""Small reference problems with known solutions."""

from __future__ import annotations

from .core import BoundaryProblem, make_problem

# Nonconstant bias example: bias 3 at x, 1 elsewhere; boundary b0=0, b1=9.
NONCONSTANT_LABELS = ("b0", "y", "x", "w", "z", "b1")
NONCONSTANT_EDGES = [(0, 1), (1, 2), (1, 3), (3, 4), (2, 4), (4, 5)]
NONCONSTANT_VALUES = {"b0": 0, "y": 2, "x": 3, "w": 4, "z": 6, "b1": 9}
# (max neighbor, min neighbor) for each interior vertex
NONCONSTANT_ARROWS = {"y": ("w", "b0"), "x": ("z", "y"), "w": ("z", "y"), "z": ("b1", "x")}


def nonconstant_bias_problem() -> BoundaryProblem:
    return make_problem(
        6, NONCONSTANT_EDGES, {0: 0, 5: 9},
        per_vertex={1: 1, 2: 3, 3: 1, 4: 1},
        labels=NONCONSTANT_LABELS,
    )


# Nine-vertex graph with corners 0 and 1 whose strategies change at r0 and 1/r0.
#
#                 top
#             left     right
#          dot              comma
#     b0        low_l    low_r        b1
THRESHOLD_LABELS = ("b0", "b1", "low_l", "low_r", "dot", "comma", "left", "right", "top")
THRESHOLD_EDGES = [
    (0, 2), (2, 3), (3, 1),        # bottom row
    (0, 4), (4, 2), (4, 6),        # dot
    (1, 5), (5, 3), (5, 7),        # comma
    (6, 7), (6, 8), (7, 8),        # upper triangle
]


def threshold_problem(r) -> BoundaryProblem:
    return make_problem(9, THRESHOLD_EDGES, {0: 0, 1: 1}, r=r, labels=THRESHOLD_LABELS)


def path_problem(r=1, m=0, M=1) -> BoundaryProblem:
    """b0 - a - b1."""
    return make_problem(3, [(0, 1), (1, 2)], {0: m, 2: M}, r=r, labels=("b0", "a", "b1"))
