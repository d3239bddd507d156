from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import mpf_fraction
from slitflow import cfrac
from slitflow.cfrac import SQUARES, ContinuedFraction, CoefficientSequence
from slitflow.interval import PrecisionError

CF = cfrac.DEFAULT


def bottom_up(coeffs):
    x = Fraction(0)
    for a in reversed(coeffs):
        x = 1 / (a + x)
    return x


def test_first_convergents():
    assert [CF.pq(k) for k in range(1, 4)] == [(1, 1), (4, 5), (37, 46)]
    assert CF.pq(5) == (14937, 18571)
    assert CF.q(7) == 32814124


@given(st.integers(1, 40))
def test_convergent_matches_bottom_up(k):
    p, q = CF.pq(k)
    assert Fraction(p, q) == bottom_up([k2 * k2 for k2 in range(1, k + 1)])


def test_determinant_identity_to_50():
    for k in range(2, 51):
        (p, q), (pp, qq) = CF.pq(k), CF.pq(k - 1)
        assert p * qq - pp * q == (-1) ** (k + 1)


@given(st.integers(1, 30))
def test_alpha_nested_enclosures(d):
    a, b = CF.enclose_alpha(d), CF.enclose_alpha(d + 1)
    assert a.lo <= b.lo and b.hi <= a.hi


def test_alpha_against_mpmath():
    with mpmath.workprec(400):
        x = mpmath.mpf(0)
        for k in range(60, 0, -1):
            x = 1 / (k * k + x)
    a = CF.alpha_within(Fraction(1, 10**80))
    assert abs(a.mid - mpf_fraction(x)) < Fraction(1, 10**80)


@given(st.integers(1, 20))
def test_error_sign_alternates(k):
    e = CF.signed_error(k)
    assert e.sign() == (1 if k % 2 == 0 else -1)
    assert abs(e).hi < Fraction(1, CF.q(k + 1))


def test_coefficient_index_errors():
    with pytest.raises(IndexError):
        CF.coefficient(0)
    with pytest.raises(ValueError):
        CF.check_assumptions(1)


def test_other_sequences():
    ones = ContinuedFraction(CoefficientSequence(lambda k: 1, "ones"))
    assert [ones.q(k) for k in range(1, 8)] == [1, 2, 3, 5, 8, 13, 21]
    assert SQUARES(3) == 9


def b_oracle(terms=12, prec=400):
    """b from mpmath intervals, independent of the exact-rational path."""
    old, mpmath.iv.prec = mpmath.iv.prec, prec
    try:
        x = mpmath.iv.mpf(0)
        for k in range(80, 0, -1):
            x = 1 / (k * k + x)
        s = mpmath.iv.mpf(0)
        for j in range(1, terms):
            p, q = CF.pq(2 * j + 1)
            s += 2 * abs(q * x - p)
    finally:
        mpmath.iv.prec = old
    return s


def test_b_enclosures():
    b12 = CF.compute_b(Fraction(1, 10**12))
    b30 = CF.compute_b(Fraction(1, 10**30))
    assert b12.enclosure.width <= Fraction(1, 10**12)
    assert b30.enclosure.width <= Fraction(1, 10**30)
    assert b12.enclosure.intersects(b30.enclosure)
    ref = b_oracle()
    ref_lo, ref_hi = mpf_fraction(ref)
    assert b30.enclosure.lo <= ref_hi and ref_lo <= b30.enclosure.hi
    assert abs(float(b12.enclosure) - 0.0026954) < 1e-7


def test_b_terms_respect_best_approximation():
    b = CF.compute_b(Fraction(1, 10**20))
    for j, term in enumerate(b.terms, 1):
        assert term.hi < Fraction(1, CF.q(2 * j + 2))


def test_b_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        CF.compute_b(0)


def test_assumption_a_against_closed_form():
    rep = CF.check_assumptions(10)
    s = rep.a_partial_sums
    assert all(x < y for x, y in zip(s, s[1:]))
    exact = sum(Fraction(1, (2 * k + 2) ** 2) for k in range(1, 11))
    assert s[-1] == exact
    assert abs(float(exact) - 0.13951) < 1e-5
    assert s[-1] <= rep.a_limit.lo
    assert abs(float(rep.a_limit) - (mpmath.pi**2 / 6 - 1) / 4) < 1e-15


def test_assumption_c_ratios():
    rep = CF.check_assumptions(10)
    assert rep.c_decreasing_from is not None and rep.c_decreasing_from <= 3
    assert max(float(v.hi) for v in rep.c_scaled[2:]) < 0.41  # frozen regression bound
    assert rep.b_increasing


def test_precision_error_is_arithmetic():
    assert issubclass(PrecisionError, ArithmeticError)
