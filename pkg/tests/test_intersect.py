from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slitflow.flatsurf.intersect import brute_force_count, count_open_parallelogram, floor_sum
from slitflow.interval import PrecisionError


@given(st.integers(0, 60), st.integers(1, 40), st.integers(-50, 50), st.integers(-50, 50))
def test_floor_sum_matches_direct(n, m, a, b):
    assert floor_sum(n, m, a, b) == sum((a * i + b) // m for i in range(n))


coord = st.fractions(min_value=-12, max_value=12, max_denominator=97)


@given(coord, st.integers(-12, 12), coord, st.integers(-12, 12))
def test_parallelogram_count_matches_enumeration(ax, ay, bx, by):
    if ax * by - ay * bx == 0:
        with pytest.raises(PrecisionError):
            count_open_parallelogram((ax, ay), (bx, by))
        return
    assert count_open_parallelogram((ax, ay), (bx, by)) == brute_force_count((ax, ay), (bx, by))


def test_torus_curves_by_determinant():
    # segments (p, q) and (r, s) with an irrational-like shift: crossings ~ |det|
    A, B = (Fraction(7, 3) + Fraction(1, 97), 5), (Fraction(2, 7) + Fraction(1, 97), 3)
    assert count_open_parallelogram(A, B) == brute_force_count(A, B)


def test_long_thin_parallelogram():
    A = (Fraction(3001, 7), 400)
    B = (Fraction(3, 11), 1)
    assert count_open_parallelogram(A, B) == brute_force_count(A, B)


def test_huge_counts_close_to_area():
    A = (Fraction(10**30 + 1, 7), 10**30)
    B = (Fraction(3, 11) + Fraction(1, 10**9), 1)
    n = count_open_parallelogram(A, B)
    area = abs(A[0] * B[1] - A[1] * B[0])
    assert abs(n - area) <= 4 * 10**30  # lattice-point error is at most the perimeter scale
