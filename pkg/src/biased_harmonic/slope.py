"""r-slopes of functions along paths and the harmonic fill of a path.

For a path of length ``n`` from ``x`` to ``y`` the r-slope is

    (g(y) - r**n * g(x)) / (1 + r + ... + r**(n-1))

which only depends on the endpoint values and the length.  For ``r = 1`` it
is the ordinary rise over run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def geom_sum(r: Fraction, n: int) -> Fraction:
    """1 + r + ... + r**(n-1)."""
    if n < 1:
        raise ValueError("n must be positive")
    r = Fraction(r)
    if r == 1:
        return Fraction(n)
    return (1 - r**n) / (1 - r)


def r_slope(gx, gy, n: int, r) -> Fraction:
    r = Fraction(r)
    return (Fraction(gy) - r**n * Fraction(gx)) / geom_sum(r, n)


@dataclass(frozen=True, order=True)
class PathSlope:
    """An r-slope together with the data it was computed from."""

    value: Fraction
    length: int
    start_value: Fraction
    end_value: Fraction

    @classmethod
    def of(cls, gx, gy, n: int, r) -> "PathSlope":
        return cls(r_slope(gx, gy, n, r), n, Fraction(gx), Fraction(gy))


def path_fill(m, M, n: int, r) -> list[Fraction]:
    """Interior values of the r-harmonic function on a path of length ``n``.

    The endpoints carry ``m <= M``; the i-th increment is
    ``(M - m) * r**i / geom_sum(r, n)``, so the result is nondecreasing and
    the same code serves ``r == 1``.
    """
    m, M, r = Fraction(m), Fraction(M), Fraction(r)
    if m > M:
        raise ValueError(f"path_fill needs m <= M, got m={m}, M={M}")
    if n < 1:
        raise ValueError("n must be positive")
    step = (M - m) / geom_sum(r, n)
    out = []
    u = m
    power = Fraction(1)
    for _ in range(n - 1):
        u += step * power
        power *= r
        out.append(u)
    return out


def path_fill_closed_form(m, M, n: int, r) -> list[Fraction]:
    """A + B r**i form (r != 1) and linear interpolation (r == 1)."""
    m, M, r = Fraction(m), Fraction(M), Fraction(r)
    if r == 1:
        return [m + (M - m) * i / n for i in range(1, n)]
    A = (M - r**n * m) / (1 - r**n)
    B = (m - M) / (1 - r**n)
    return [A + B * r**i for i in range(1, n)]
