from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from biased_harmonic.slope import PathSlope, geom_sum, path_fill, path_fill_closed_form, r_slope

F = Fraction


def slope_by_definition(gx, gy, n, r):
    # explicit power sum, no ratio formula
    return (F(gy) - F(r) ** n * F(gx)) / sum(F(r) ** i for i in range(n))


@pytest.mark.parametrize("r, n, expected", [(1, 5, 5), (2, 3, 7), (F(1, 2), 2, F(3, 2))])
def test_geom_sum(r, n, expected):
    assert geom_sum(F(r), n) == expected


@pytest.mark.parametrize("gx, gy, n, r, expected", [
    (0, 1, 2, 1, F(1, 2)),
    (0, 1, 2, 2, F(1, 3)),
    (1, 1, 1, 2, F(-1)),
])
def test_r_slope_examples(gx, gy, n, r, expected):
    assert r_slope(gx, gy, n, r) == expected


@pytest.mark.parametrize("m, M, n, r, expected", [
    (0, 9, 3, 1, [3, 6]),
    (0, 7, 3, 2, [1, 3]),
    (5, 5, 4, 3, [5, 5, 5]),
    (0, 9, 3, 2, [F(9, 7), F(27, 7)]),
    (0, 1, 1, 2, []),
])
def test_path_fill_examples(m, M, n, r, expected):
    assert path_fill(m, M, n, r) == expected


def test_path_fill_rejects_decreasing():
    with pytest.raises(ValueError):
        path_fill(2, 1, 3, 1)


def test_path_slope_record():
    s = PathSlope.of(0, 1, 2, 2)
    assert (s.value, s.length, s.start_value, s.end_value) == (F(1, 3), 2, 0, 1)


values = st.fractions(min_value=-50, max_value=50, max_denominator=30)
biases = st.fractions(min_value=F(1, 20), max_value=20, max_denominator=20).filter(lambda r: r > 0)
lengths = st.integers(min_value=1, max_value=9)


@given(values, values, lengths, biases)
def test_slope_matches_definition(gx, gy, n, r):
    assert r_slope(gx, gy, n, r) == slope_by_definition(gx, gy, n, r)


@given(values, values, lengths)
def test_unbiased_slope_is_rise_over_run(gx, gy, n):
    assert r_slope(gx, gy, n, 1) == (gy - gx) / n


@given(values, values, values, lengths, lengths, biases)
def test_split_is_convex_combination(gx, gz, gy, m, k, r):
    total = geom_sum(r, m + k)
    w1 = sum(r**i for i in range(k, k + m)) / total
    w2 = geom_sum(r, k) / total
    assert w1 + w2 == 1 and 0 <= w1 <= 1 and 0 <= w2 <= 1
    assert r_slope(gx, gy, m + k, r) == w1 * r_slope(gx, gz, m, r) + w2 * r_slope(gz, gy, k, r)


@given(st.lists(values, min_size=2, max_size=9), biases)
def test_path_slope_from_edge_slopes(seq, r):
    n = len(seq) - 1
    edge = [r_slope(a, b, 1, r) for a, b in zip(seq, seq[1:])]
    expected = sum(r ** (n - i) / geom_sum(r, n) * edge[i - 1] for i in range(1, n + 1))
    assert r_slope(seq[0], seq[-1], n, r) == expected


@given(values, values, lengths, biases)
def test_reversal(gx, gy, n, r):
    diff = r_slope(gx, gy, n, r) - r_slope(gy, gx, n, r)
    assert diff == (gy - gx) * (1 + r**n) / geom_sum(r, n)
    assert (diff > 0) == (gy > gx)
    assert (diff == 0) == (gy == gx)


@given(values, values, lengths, lengths, biases)
def test_shorter_is_steeper(a, b, n1, n2, r):
    gx, gy = min(a, b), max(a, b)
    if n1 == n2 or gx == gy:
        return
    short, long = sorted((n1, n2))
    assert r_slope(gx, gy, short, r) > r_slope(gx, gy, long, r)


@given(values, values, lengths, biases)
def test_reciprocal_bias(gx, gy, n, r):
    assert r_slope(gx, gy, n, r) == -r * r_slope(gy, gx, n, 1 / r)


@settings(max_examples=200)
@given(values, values, lengths, biases)
def test_fill_has_constant_edge_slopes_and_is_harmonic(a, b, n, r):
    m, M = min(a, b), max(a, b)
    seq = [m, *path_fill(m, M, n, r), M]
    assert all(r_slope(u, v, 1, r) == r_slope(m, M, n, r) for u, v in zip(seq, seq[1:]))
    p, q = 1 / (1 + r), r / (1 + r)
    for i in range(1, n):
        assert p * max(seq[i - 1], seq[i + 1]) + q * min(seq[i - 1], seq[i + 1]) == seq[i]
    if m < M:
        assert all(u < v for u, v in zip(seq, seq[1:]))
    else:
        assert all(u == m for u in seq)


@given(values, values, lengths, biases)
def test_fill_forms_agree(a, b, n, r):
    m, M = min(a, b), max(a, b)
    assert path_fill(m, M, n, r) == path_fill_closed_form(m, M, n, r)
